#pragma once

#include <string>

#include "vinedist/distance.hpp"
#include "vinedist/experiments.hpp"
#include "vinedist/vine.hpp"

namespace vinedist {

// Vine file format: one JSON document with fields d, structure, families,
// par1, par2. Matrices are d x d with zero (or empty-string) upper triangle;
// family codes as in `family_code`. Reals are written with 17 significant
// digits.
std::string vine_to_text(const VineSpec& r);
VineSpec vine_from_text(const std::string& text);

void write_vine_file(const VineSpec& r, const std::string& path);
VineSpec parse_vine_file(const std::string& path);

// Deterministic report serialization; wall time is reported separately so
// that standard output stays byte-identical across runs.
std::string report_to_text(const DistanceReport& rep);

std::string study_to_text(const StudyResult& res);   // machine-readable JSON
std::string render_study_table(const StudyResult& res);  // aligned plain text

}  // namespace vinedist
