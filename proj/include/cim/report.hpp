#pragma once

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "cim/experiment.hpp"

namespace cim {

enum class Layout : std::uint8_t { Table1, Fig2, Fig3a, Fig3b, Fig3c, Table2 };

std::string_view to_string(Layout l);
Layout parse_layout(std::string_view name);

/// Which aggregate fills the cells.
enum class Metric : std::uint8_t { NTrue, DecidedTrue };

std::string_view to_string(Metric m);
Metric parse_metric(std::string_view name);

struct ReportOptions {
  Metric metric = Metric::NTrue;
  /// Opponent for the fig3 layouts.
  Opponent fp{true, Strategy::Random};
  /// Sweep grid for the fig3 layouts; empty uses the default for the axis.
  std::vector<double> grid;
};

/// The axis plotted by a fig3 layout; None for the others.
SweepAxis layout_axis(Layout l);

/// Writes the CSV for one layout. Throws std::runtime_error listing every
/// missing coordinate when `rows` do not cover the layout.
///
///   table1  scheme,model,random,af,bf,sgf,cf,drl       (12 rows)
///   fig2    fp,drim-a,drim-na,cstorm,storm              (uom, one row per fp)
///   fig3x   fp,<axis>,drim-a,drim-na,cstorm,storm       (uom, one row per grid value)
void emit_report(std::ostream& out, Layout layout, std::span<const ResultRow> rows, const ReportOptions& opts = {});

/// table2: scheme,mean_seconds,std_seconds,episodes in drim-a, drim-na, cstorm, storm order.
void emit_bench_report(std::ostream& out, std::span<const BenchRow> rows);

std::vector<BenchRow> read_bench_csv(std::istream& in);

}  // namespace cim
