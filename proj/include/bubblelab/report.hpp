#pragma once
#include <iosfwd>
#include <string>
#include <vector>

#include "bubblelab/experiments.hpp"

namespace bl {

// Fixed-precision number formatting shared by every CSV writer ("nan" for NaN).
std::string fmt(double v);

void write_sweep_csv(std::ostream& os, const std::vector<ExperimentRecord>& records);

// Gnuplot script plotting distance against gamma (log-log) with the fitted and
// expected slopes, or measured against predicted projections for quadrature sweeps.
void write_gnuplot_script(std::ostream& os, const std::string& csv_file, const SweepResult& r);

// Writes `content` to `path` atomically enough for our purposes (temp file + rename).
void write_text_file(const std::string& path, const std::string& content);

}  // namespace bl
