#include "bubblelab/field.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "bubblelab/errors.hpp"

namespace bl {

Field::Field(DiscPtr d) : disc_(std::move(d)), v_(Eigen::VectorXd::Zero(disc_->size())) {}

Field::Field(DiscPtr d, Eigen::VectorXd values) : disc_(std::move(d)), v_(std::move(values)) {
  if (static_cast<size_t>(v_.size()) != disc_->size())
    throw ConfigError("field value count does not match the grid");
}

Field Field::sample(DiscPtr d, const std::function<double(std::span<const double>)>& f) {
  Eigen::VectorXd v(d->size());
  for (size_t i = 0; i < d->size(); ++i) v[static_cast<long>(i)] = f(d->node(i));
  return Field(d, std::move(v));
}

void Field::check_finite() const {
  if (!v_.allFinite()) throw SolverError("field contains non-finite values");
}

void Field::check_compatible(const Field& o) const {
  if (disc_ != o.disc_) throw ConfigError("fields live on different grids");
}

Field operator+(const Field& a, const Field& b) {
  a.check_compatible(b);
  return Field(a.disc_ptr(), a.values() + b.values());
}

Field operator-(const Field& a, const Field& b) {
  a.check_compatible(b);
  return Field(a.disc_ptr(), a.values() - b.values());
}

Field scale(const Field& a, double s) { return Field(a.disc_ptr(), a.values() * s); }

Field pointwise_power(const Field& a, double p) {
  Eigen::VectorXd v = a.values().unaryExpr([p](double x) {
    return x >= 0 ? std::pow(x, p) : -std::pow(-x, p);
  });
  return Field(a.disc_ptr(), std::move(v));
}

Field positive_part(const Field& a) {
  return Field(a.disc_ptr(), a.values().cwiseMax(0.0));
}

Field negative_part(const Field& a) {
  return Field(a.disc_ptr(), (-a.values()).cwiseMax(0.0));
}

void Field::write_csv(std::ostream& os) const {
  const auto& d = *disc_;
  os << "# domain=" << d.domain().describe() << " n=" << d.n() << " grid=" << d.grid().describe()
     << "\n";
  os << "index";
  for (int k = 1; k <= d.n(); ++k) os << ",x" << k;
  os << ",value\n";
  os << std::setprecision(17);
  for (size_t i = 0; i < size(); ++i) {
    os << i;
    for (double c : d.node(i)) os << "," << c;
    os << "," << v_[static_cast<long>(i)] << "\n";
  }
}

Field Field::read_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("# ", 0) != 0)
    throw ConfigError("field CSV is missing its header line");
  std::string dom, grid;
  int n = 0;
  std::istringstream hs(header.substr(2));
  std::string tok;
  while (hs >> tok) {
    if (tok.rfind("domain=", 0) == 0) dom = tok.substr(7);
    else if (tok.rfind("n=", 0) == 0) n = std::stoi(tok.substr(2));
    else if (tok.rfind("grid=", 0) == 0) grid = tok.substr(5);
  }
  if (dom.empty() || grid.empty() || n < 2) throw ConfigError("malformed field CSV header");
  auto disc = Discretization::make(DomainModel::parse(dom, n), GridSpec::parse(grid));
  std::string line;
  std::getline(is, line);  // column names
  Eigen::VectorXd v = Eigen::VectorXd::Zero(disc->size());
  size_t rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != static_cast<size_t>(n + 2)) throw ConfigError("malformed field CSV row");
    size_t idx = std::stoul(cells[0]);
    if (idx >= disc->size()) throw ConfigError("field CSV index out of range");
    v[static_cast<long>(idx)] = std::stod(cells.back());
    ++rows;
  }
  if (rows != disc->size()) throw ConfigError("field CSV row count does not match its grid");
  return Field(disc, std::move(v));
}

}  // namespace bl
