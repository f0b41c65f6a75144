#include "cim/report.hpp"

#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace cim {

std::string_view to_string(Layout l) {
  switch (l) {
    case Layout::Table1: return "table1";
    case Layout::Fig2: return "fig2";
    case Layout::Fig3a: return "fig3a";
    case Layout::Fig3b: return "fig3b";
    case Layout::Fig3c: return "fig3c";
    case Layout::Table2: return "table2";
  }
  return "?";
}

Layout parse_layout(std::string_view name) {
  for (Layout l : {Layout::Table1, Layout::Fig2, Layout::Fig3a, Layout::Fig3b, Layout::Fig3c, Layout::Table2}) {
    if (name == to_string(l)) return l;
  }
  throw std::invalid_argument("unknown layout '" + std::string(name) + "'");
}

std::string_view to_string(Metric m) { return m == Metric::NTrue ? "n_true" : "decided_true"; }

Metric parse_metric(std::string_view name) {
  if (name == "n_true") return Metric::NTrue;
  if (name == "decided_true") return Metric::DecidedTrue;
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

SweepAxis layout_axis(Layout l) {
  switch (l) {
    case Layout::Fig3a: return SweepAxis::Ip;
    case Layout::Fig3b: return SweepAxis::Pnv;
    case Layout::Fig3c: return SweepAxis::Prior;
    default: return SweepAxis::None;
  }
}

namespace {

constexpr Scheme kSchemeOrder[] = {Scheme::DrimA, Scheme::DrimNA, Scheme::CStorm, Scheme::Storm};
constexpr TrustKind kModelOrder[] = {TrustKind::Uom, TrustKind::Hom, TrustKind::Nom};

class Lookup {
 public:
  Lookup(std::span<const ResultRow> rows, Metric metric) : metric_(metric) {
    for (const ResultRow& r : rows) rows_.emplace(r.at, &r);
  }

  // Empty string when missing; the coordinate is remembered for the error.
  std::string cell(const Coordinate& at) {
    auto it = rows_.find(at);
    if (it == rows_.end()) {
      std::ostringstream s;
      s << to_string(at.scheme) << '/' << to_string(at.model) << "/fp=" << to_string(at.fp);
      if (at.axis != SweepAxis::None) s << '/' << to_string(at.axis) << '=' << at.value;
      missing_.push_back(s.str());
      return {};
    }
    const ResultRow& r = *it->second;
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << (metric_ == Metric::NTrue ? r.mean_n_true : r.mean_decided_true);
    return s.str();
  }

  void throw_if_missing(Layout l) const {
    if (missing_.empty()) return;
    std::string msg = std::string(to_string(l)) + " is missing " + std::to_string(missing_.size()) + " cell(s):";
    for (const std::string& m : missing_) msg += " " + m;
    throw std::runtime_error(msg);
  }

 private:
  Metric metric_;
  std::map<Coordinate, const ResultRow*> rows_;
  std::vector<std::string> missing_;
};

}  // namespace

void emit_report(std::ostream& out, Layout layout, std::span<const ResultRow> rows, const ReportOptions& opts) {
  if (layout == Layout::Table2) throw std::invalid_argument("table2 is built from bench rows");
  Lookup look(rows, opts.metric);
  std::ostringstream body;

  switch (layout) {
    case Layout::Table1: {
      body << "scheme,model";
      for (const Opponent& o : all_opponents()) body << ',' << to_string(o);
      body << '\n';
      for (Scheme s : kSchemeOrder) {
        for (TrustKind m : kModelOrder) {
          body << to_string(s) << ',' << to_string(m);
          for (const Opponent& o : all_opponents()) body << ',' << look.cell({s, m, o, SweepAxis::None, 0.0});
          body << '\n';
        }
      }
      break;
    }
    case Layout::Fig2: {
      body << "fp";
      for (Scheme s : kSchemeOrder) body << ',' << to_string(s);
      body << '\n';
      for (const Opponent& o : all_opponents()) {
        body << to_string(o);
        for (Scheme s : kSchemeOrder) body << ',' << look.cell({s, TrustKind::Uom, o, SweepAxis::None, 0.0});
        body << '\n';
      }
      break;
    }
    default: {
      const SweepAxis axis = layout_axis(layout);
      const std::vector<double> grid = opts.grid.empty() ? default_grid(axis) : opts.grid;
      body << "fp," << to_string(axis);
      for (Scheme s : kSchemeOrder) body << ',' << to_string(s);
      body << '\n';
      for (double v : grid) {
        body << to_string(opts.fp) << ',' << v;
        for (Scheme s : kSchemeOrder) body << ',' << look.cell({s, TrustKind::Uom, opts.fp, axis, v});
        body << '\n';
      }
      break;
    }
  }
  look.throw_if_missing(layout);
  out << body.str();
}

void emit_bench_report(std::ostream& out, std::span<const BenchRow> rows) {
  std::map<Scheme, const BenchRow*> by;
  for (const BenchRow& r : rows) by[r.scheme] = &r;
  std::string missing;
  for (Scheme s : kSchemeOrder) {
    if (!by.contains(s)) missing += " " + std::string(to_string(s));
  }
  if (!missing.empty()) throw std::runtime_error("table2 is missing scheme(s):" + missing);
  out << "scheme,mean_seconds,std_seconds,episodes\n" << std::setprecision(6);
  for (Scheme s : kSchemeOrder) {
    const BenchRow& r = *by[s];
    out << to_string(s) << ',' << r.mean_seconds << ',' << r.std_seconds << ',' << r.episodes << '\n';
  }
}

std::vector<BenchRow> read_bench_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "scheme,episodes,mean_seconds,std_seconds") {
    throw std::runtime_error("not a bench file");
  }
  std::vector<BenchRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream s(line);
    std::string scheme, episodes, mean, sd;
    std::getline(s, scheme, ',');
    std::getline(s, episodes, ',');
    std::getline(s, mean, ',');
    std::getline(s, sd, ',');
    rows.push_back({parse_scheme(scheme), std::stoul(episodes), std::stod(mean), std::stod(sd)});
  }
  return rows;
}

}  // namespace cim
