#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vinedist/distance.hpp"
#include "vinedist/errors.hpp"
#include "vinedist/experiments.hpp"
#include "vinedist/io.hpp"
#include "vinedist/vine.hpp"

namespace py = pybind11;
using namespace vinedist;

namespace {

using Rows = std::vector<std::vector<double>>;

VineSpec spec_from_lists(const std::vector<std::vector<int>>& structure,
                         const std::vector<std::vector<std::string>>& families,
                         const Rows& par1, const Rows& par2) {
    const int d = static_cast<int>(structure.size());
    StructureMatrix m(d, 0);
    TriMat<PairCopula> pairs(d);
    for (int i = 1; i <= d; ++i)
        for (int j = 1; j <= d; ++j) m.at(i, j) = structure[i - 1][j - 1];
    for (int i = 2; i <= d; ++i)
        for (int j = 1; j < i; ++j)
            pairs.at(i, j) =
                pair_from_code(families[i - 1][j - 1], par1[i - 1][j - 1], par2[i - 1][j - 1]);
    return VineSpec(std::move(m), std::move(pairs));
}

py::dict report_to_dict(const DistanceReport& rep) {
    py::dict d;
    d["method"] = rep.method;
    d["value"] = rep.value;
    if (rep.n > 0) d["n"] = rep.n;
    if (rep.beta > 0) d["beta"] = rep.beta;
    if (rep.a > 0) d["a"] = rep.a;
    if (rep.tol > 0) d["tol"] = rep.tol;
    if (rep.n_mc > 0) {
        d["n_mc"] = rep.n_mc;
        d["seed"] = rep.seed;
    }
    d["evaluations"] = rep.evaluations;
    d["wallclock_s"] = rep.wallclock_s;
    if (!rep.note.empty()) d["note"] = rep.note;
    return d;
}

Rows sample_rows(const VineSpec& r, std::size_t n, std::uint64_t seed) {
    const std::vector<double> flat = sample_vine(r, n, seed);
    const int d = r.dim();
    Rows rows(n, std::vector<double>(d));
    for (std::size_t i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) rows[i][j] = flat[i * d + j];
    return rows;
}

Rows corr_rows(const TriMat<double>& m) {
    Rows rows(m.dim(), std::vector<double>(m.dim()));
    for (int i = 1; i <= m.dim(); ++i)
        for (int j = 1; j <= m.dim(); ++j) rows[i - 1][j - 1] = m.at(i, j);
    return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "vine-copula model distances (C++ core)";

    py::register_exception<Error>(m, "VinedistError");

    py::class_<VineSpec>(m, "VineSpec")
        .def(py::init(&spec_from_lists), py::arg("structure"), py::arg("families"),
             py::arg("par1"), py::arg("par2"))
        .def_property_readonly("dim", &VineSpec::dim)
        .def_property_readonly("canonical", &VineSpec::canonical)
        .def("structure",
             [](const VineSpec& r) {
                 std::vector<std::vector<int>> rows(r.dim(), std::vector<int>(r.dim(), 0));
                 for (int i = 1; i <= r.dim(); ++i)
                     for (int j = 1; j <= i; ++j) rows[i - 1][j - 1] = r.structure().at(i, j);
                 return rows;
             })
        .def("to_text", &vine_to_text)
        .def("__repr__", [](const VineSpec& r) {
            return "<VineSpec d=" + std::to_string(r.dim()) + ">";
        });

    m.def("vine_from_text", &vine_from_text, py::arg("text"));
    m.def("parse_vine_file", &parse_vine_file, py::arg("path"));
    m.def("write_vine_file", &write_vine_file, py::arg("spec"), py::arg("path"));

    m.def("log_density", [](const VineSpec& r, const std::vector<double>& u) {
        return vine_log_density(r, u);
    });
    m.def("sample", &sample_rows, py::arg("spec"), py::arg("n"), py::arg("seed"));
    m.def("rosenblatt_forward", [](const VineSpec& r, const std::vector<double>& u) {
        return rosenblatt_forward(r, u);
    });
    m.def("rosenblatt_inverse", [](const VineSpec& r, const std::vector<double>& w) {
        return rosenblatt_inverse(r, w);
    });
    m.def("nearest_gaussian", &nearest_gaussian);
    m.def("trim", &trim_structure, py::arg("spec"), py::arg("k"));
    m.def("count_same_diagonal", &count_same_diagonal_str, py::arg("d"));

    m.def(
        "akl",
        [](const VineSpec& f, const VineSpec& g, int n, double beta, bool force, int workers) {
            return report_to_dict(akl(f, g, {n, beta, 0.0}, force, workers));
        },
        py::arg("f"), py::arg("g"), py::arg("n") = 10, py::arg("beta") = 0.95,
        py::arg("force") = false, py::arg("workers") = 0);
    m.def(
        "dkl",
        [](const VineSpec& f, const VineSpec& g, int n, double beta, double a, bool force,
           int workers) { return report_to_dict(dkl(f, g, {n, beta, a}, force, workers)); },
        py::arg("f"), py::arg("g"), py::arg("n") = 10, py::arg("beta") = 0.95,
        py::arg("a") = 4.0, py::arg("force") = false, py::arg("workers") = 0);
    m.def(
        "sdkl",
        [](const VineSpec& f, const VineSpec& g, int n, double beta, double a, int workers) {
            return report_to_dict(sdkl(f, g, {n, beta, a}, workers));
        },
        py::arg("f"), py::arg("g"), py::arg("n") = 10, py::arg("beta") = 0.95,
        py::arg("a") = 4.0, py::arg("workers") = 0);
    m.def(
        "mckl",
        [](const VineSpec& f, const VineSpec& g, std::uint64_t n_mc, std::uint64_t seed,
           int workers) { return report_to_dict(mckl(f, g, n_mc, seed, workers)); },
        py::arg("f"), py::arg("g"), py::arg("n_mc") = 1000000, py::arg("seed") = 1,
        py::arg("workers") = 0);
    m.def(
        "cubature_kl",
        [](const VineSpec& f, const VineSpec& g, double beta, double tol, int workers) {
            return report_to_dict(cubature_kl(f, g, beta, tol, workers));
        },
        py::arg("f"), py::arg("g"), py::arg("beta") = 0.95, py::arg("tol") = 1e-4,
        py::arg("workers") = 0);
    m.def("gaussian_vine_corr",
          [](const VineSpec& r) { return corr_rows(gaussian_vine_corr(r)); });
    m.def("gaussian_kl", [](const Rows& sf, const Rows& sg) {
        const int d = static_cast<int>(sf.size());
        TriMat<double> a(d), b(d);
        for (int i = 1; i <= d; ++i)
            for (int j = 1; j <= d; ++j) {
                a.at(i, j) = sf[i - 1][j - 1];
                b.at(i, j) = sg[i - 1][j - 1];
            }
        return gaussian_kl_analytic(a, b);
    });

    m.def("dvine_structure", [](int d) {
        const StructureMatrix m = dvine_structure(d);
        std::vector<std::vector<int>> rows(d, std::vector<int>(d, 0));
        for (int i = 1; i <= d; ++i)
            for (int j = 1; j <= i; ++j) rows[i - 1][j - 1] = m.at(i, j);
        return rows;
    });
    m.def("t_vine", &t_vine, py::arg("d"), py::arg("tau"), py::arg("nu"));
    m.def(
        "single_family_vine",
        [](int d, const std::string& code, double tau) {
            const bool survival = !code.empty() && code[0] == 's';
            const std::string f = survival ? code.substr(1) : code;
            Family fam;
            if (f == "N")
                fam = Family::Gaussian;
            else if (f == "C")
                fam = Family::Clayton;
            else if (f == "G")
                fam = Family::Gumbel;
            else if (f == "F")
                fam = Family::Frank;
            else if (f == "J")
                fam = Family::Joe;
            else
                throw Error(ErrorKind::Parse, "unknown family code '" + code + "'");
            return single_family_vine(d, fam, survival, tau);
        },
        py::arg("d"), py::arg("family"), py::arg("tau"));
    m.def("random_gaussian_vine", &random_gaussian_vine, py::arg("d"), py::arg("seed"));
    m.def("euro_stoxx4", &euro_stoxx4);
    m.def("spearman", [](const std::vector<double>& x, const std::vector<double>& y) {
        return spearman(x, y);
    });
    m.def(
        "reproduce_table",
        [](const std::string& table, const std::string& scale, int workers) {
            const StudyScale sc = (scale == "paper") ? StudyScale::Paper : StudyScale::Desk;
            const StudyResult res = reproduce_table(table_from_string(table), sc, workers);
            py::dict out;
            out["json"] = study_to_text(res);
            out["table"] = render_study_table(res);
            return out;
        },
        py::arg("table"), py::arg("scale") = "desk", py::arg("workers") = 0);
}
