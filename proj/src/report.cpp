#include "bubblelab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "bubblelab/errors.hpp"

namespace bl {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_sweep_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
  os << "regime,n,nu,kind,delta,dist_boundary,kappa,gamma,distance,neg_part,pred_dil,meas_dil,pred_tr,meas_tr\n";
  for (auto& r : records) {
    os << r.regime << "," << r.n << "," << r.nu << "," << to_string(r.kind) << ","
       << fmt(r.deltas.empty() ? kNaN : r.deltas.front()) << "," << fmt(r.dist_boundary) << "," << fmt(r.kappa)
       << "," << fmt(r.gamma) << "," << fmt(r.distance) << "," << fmt(r.neg_part) << "," << fmt(r.pred_dil) << ","
       << fmt(r.meas_dil) << "," << fmt(r.pred_tr) << "," << fmt(r.meas_tr) << "\n";
  }
}

void write_gnuplot_script(std::ostream& os, const std::string& csv_file, const SweepResult& r) {
  const std::string name = r.records.empty() ? "sweep" : r.records.front().regime;
  os << "# " << name << ": " << r.regime.row << "\n";
  os << "set datafile separator ','\n";
  os << "set key top left\n";
  os << "set logscale xy\n";
  os << "set terminal pngcairo size 800,600\n";
  os << "set output '" << std::filesystem::path(csv_file).stem().string() << ".png'\n";
  if (r.has_fit) {
    os << "set xlabel 'Gamma(u)'\nset ylabel 'd_*(u)'\n";
    os << "a = " << fmt(r.fit.slope) << "\nb = " << fmt(r.fit.intercept) << "\n";
    os << "e = " << fmt(r.regime.expected_exponent) << "\nlp = " << fmt(r.regime.expected_log_power) << "\n";
    os << "fit_line(x) = exp(b) * x**a * abs(log(x))**lp\n";
    os << "plot '" << csv_file << "' every ::1 using 8:9 with linespoints title 'measured', \\\n"
       << "     fit_line(x) title sprintf('fit slope %.3f (expected %.3f)', a, e)\n";
  } else {
    os << "set xlabel 'distance to boundary'\nset ylabel '|projection|'\n";
    os << "plot '" << csv_file << "' every ::1 using 6:(abs($12)) with points title 'measured dilation', \\\n"
       << "     '' every ::1 using 6:(abs($11)) with lines title 'predicted dilation', \\\n"
       << "     '' every ::1 using 6:(abs($14)) with points title 'measured translation', \\\n"
       << "     '' every ::1 using 6:(abs($13)) with lines title 'predicted translation'\n";
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  auto tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw ConfigError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, p);
}

}  // namespace bl
