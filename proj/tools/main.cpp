#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vinedist/distance.hpp"
#include "vinedist/errors.hpp"
#include "vinedist/experiments.hpp"
#include "vinedist/io.hpp"
#include "vinedist/vine.hpp"

namespace {

using namespace vinedist;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> parse_point(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        out.push_back(std::stod(s.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

// Distances assume canonical labels; files may carry any diagonal. Both
// inputs are relabeled together after the diagonal-equality check.
VineSpec load_vine(const std::string& path) { return parse_vine_file(path); }

struct KlOptions {
    std::string method = "dkl";
    int n = 10;
    double beta = 0.95;
    double a = 4.0;
    std::uint64_t nmc = 1000000;
    std::uint64_t seed = 1;
    double tol = 1e-4;
    bool force = false;
    int workers = 0;
    std::string file_f, file_g;
};

int run_kl(const KlOptions& opt) {
    const VineSpec rf = load_vine(opt.file_f);
    const VineSpec rg = load_vine(opt.file_g);
    DistanceReport rep;
    const GridSpec spec{opt.n, opt.beta, opt.a};
    if (opt.method == "akl")
        rep = akl(rf, rg, {opt.n, opt.beta, 0.0}, opt.force, opt.workers);
    else if (opt.method == "dkl")
        rep = dkl(rf, rg, spec, opt.force, opt.workers);
    else if (opt.method == "sdkl")
        rep = sdkl(rf, rg, spec, opt.workers);
    else if (opt.method == "mckl")
        rep = mckl(rf, rg, opt.nmc, opt.seed, opt.workers);
    else if (opt.method == "cubature")
        rep = cubature_kl(rf, rg, opt.beta, opt.tol, opt.workers);
    else if (opt.method == "gauss") {
        auto t0 = std::chrono::steady_clock::now();
        rep.method = "gauss";
        rep.value = gaussian_kl_analytic(gaussian_vine_corr(relabel_canonical(rf).first),
                                         gaussian_vine_corr(relabel_canonical(rg).first));
        rep.wallclock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    } else {
        throw_domain("unknown method '" + opt.method +
                     "' (expected akl|dkl|sdkl|mckl|cubature|gauss)");
    }
    std::cout << report_to_text(rep);
    std::cerr << "time: " << rep.wallclock_s << " s\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vine-copula model distances"};
    app.require_subcommand(1);

    // validate
    std::string val_file;
    auto* cmd_validate = app.add_subcommand("validate", "check a vine file");
    cmd_validate->add_option("file", val_file, "vine file")->required();

    // density
    std::string dens_file, dens_point;
    auto* cmd_density = app.add_subcommand("density", "evaluate the copula density");
    cmd_density->add_option("file", dens_file, "vine file")->required();
    cmd_density->add_option("--u", dens_point, "comma-separated point in (0,1)^d")->required();

    // sample
    std::string sample_file;
    std::uint64_t sample_n = 10, sample_seed = 1;
    auto* cmd_sample = app.add_subcommand("sample", "draw from the vine copula");
    cmd_sample->add_option("file", sample_file, "vine file")->required();
    cmd_sample->add_option("--n", sample_n, "number of draws");
    cmd_sample->add_option("--seed", sample_seed, "RNG seed");

    // kl
    KlOptions kl_opt;
    auto* cmd_kl = app.add_subcommand("kl", "model distance between two vines");
    cmd_kl->add_option("--method", kl_opt.method, "akl|dkl|sdkl|mckl|cubature|gauss");
    cmd_kl->add_option("--n", kl_opt.n, "grid points per margin / diagonal");
    cmd_kl->add_option("--beta", kl_opt.beta, "grid coverage volume");
    cmd_kl->add_option("--a", kl_opt.a, "tail-transform shape (0 disables)");
    cmd_kl->add_option("--nmc", kl_opt.nmc, "Monte Carlo sample size");
    cmd_kl->add_option("--seed", kl_opt.seed, "Monte Carlo seed");
    cmd_kl->add_option("--tol", kl_opt.tol, "cubature tolerance");
    cmd_kl->add_flag("--force", kl_opt.force, "override soft dimension limits");
    cmd_kl->add_option("--workers", kl_opt.workers, "worker threads (0 = auto)");
    cmd_kl->add_option("F", kl_opt.file_f, "first vine file (reference measure)")->required();
    cmd_kl->add_option("G", kl_opt.file_g, "second vine file")->required();

    // nearest-gaussian
    std::string ng_file, ng_out;
    auto* cmd_ng = app.add_subcommand("nearest-gaussian", "emit the nearest Gaussian vine");
    cmd_ng->add_option("file", ng_file, "vine file")->required();
    cmd_ng->add_option("-o,--out", ng_out, "output path (default stdout)");

    // experiment
    std::string exp_table = "T2", exp_scale = "desk";
    int exp_workers = 0;
    auto* cmd_exp = app.add_subcommand("experiment", "run a study scenario");
    cmd_exp->add_option("--table", exp_table, "T1|T2|T3|T4|T5|T6");
    cmd_exp->add_option("--scale", exp_scale, "desk|paper");
    cmd_exp->add_option("--workers", exp_workers, "worker threads (0 = auto)");

    // count-vines
    int cv_d = 3;
    auto* cmd_cv = app.add_subcommand("count-vines",
                                      "number of vine decompositions with a fixed diagonal");
    cmd_cv->add_option("--d", cv_d, "dimension")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_validate->parsed()) {
            const VineSpec r = load_vine(val_file);  // throws on any violation
            std::cout << "ok: " << r.dim() << "-dimensional vine, "
                      << (r.dim() * (r.dim() - 1)) / 2 << " pair copulas\n";
            return 0;
        }
        if (cmd_density->parsed()) {
            const VineSpec r0 = load_vine(dens_file);
            const auto [r, perm] = relabel_canonical(r0);
            std::vector<double> u = parse_point(dens_point);
            if (static_cast<int>(u.size()) != r.dim())
                throw_shape("density: point dimension mismatch");
            // the point is given in original labels; reorder to canonical
            std::vector<double> uc(u.size());
            for (std::size_t v = 0; v < u.size(); ++v) uc[perm[v] - 1] = u[v];
            const double ld = vine_log_density(r, uc);
            std::cout << "{\"log_density\": " << fmt17(ld) << ", \"density\": "
                      << fmt17(std::exp(ld)) << "}\n";
            return 0;
        }
        if (cmd_sample->parsed()) {
            const VineSpec r0 = load_vine(sample_file);
            const auto [r, perm] = relabel_canonical(r0);
            const std::vector<double> rows = sample_vine(r, sample_n, sample_seed);
            const int d = r.dim();
            for (std::uint64_t i = 0; i < sample_n; ++i) {
                for (int v = 0; v < d; ++v) {
                    // column v: variable with original label v+1
                    std::cout << (v ? " " : "") << fmt17(rows[i * d + (perm[v] - 1)]);
                }
                std::cout << "\n";
            }
            return 0;
        }
        if (cmd_kl->parsed()) return run_kl(kl_opt);
        if (cmd_ng->parsed()) {
            const VineSpec r = load_vine(ng_file);
            const VineSpec g = nearest_gaussian(r);
            if (ng_out.empty())
                std::cout << vine_to_text(g);
            else
                write_vine_file(g, ng_out);
            return 0;
        }
        if (cmd_exp->parsed()) {
            const TableId id = table_from_string(exp_table);
            const StudyScale scale = [&] {
                if (exp_scale == "desk") return StudyScale::Desk;
                if (exp_scale == "paper") return StudyScale::Paper;
                throw_domain("unknown scale '" + exp_scale + "' (expected desk|paper)");
            }();
            const StudyResult res = reproduce_table(id, scale, exp_workers);
            std::cout << study_to_text(res);
            std::cout << render_study_table(res);
            return 0;
        }
        if (cmd_cv->parsed()) {
            std::cout << count_same_diagonal_str(cv_d) << "\n";
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error[" << error_kind_name(e.kind()) << "]: " << e.what() << "\n";
        return e.kind() == ErrorKind::Numeric ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
