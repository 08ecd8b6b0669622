#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fracdiff/harness.hpp"

using namespace fracdiff;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    out.push_back(line);
  }
  return out;
}

// CSV text without the trailing timing column.
std::string without_timing(const std::string& csv) {
  std::string out;
  for (const auto& line : lines(csv)) {
    out += line.substr(0, line.rfind(',')) + '\n';
  }
  return out;
}

} // namespace

TEST(Plans, SchedulesFollowTheirRegimes) {
  const auto t6 = plan_for_table(6);
  for (const auto& l : t6.levels) {
    EXPECT_EQ(l.nt, l.nx * l.nx);
  }
  const auto t7 = plan_for_table(7);
  ASSERT_EQ(t7.levels.size(), 6u);
  for (const auto& l : t7.levels) {
    EXPECT_EQ(l.nx, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(l.nt)))));
  }
  EXPECT_EQ(t7.levels.back().nt, 2430u);
  EXPECT_EQ(plan_for_table(5).levels.front().nt, 20000u);
  EXPECT_EQ(plan_for_table(5, true).levels.front().nt, 5000u);
  EXPECT_EQ(plan_for_table(1).levels.size(), 10u);
  for (const auto& l : plan_for_table(2).levels) {
    EXPECT_EQ(l.nx, l.nt);
  }
  for (const auto& l : plan_for_table(3).levels) {
    EXPECT_EQ(l.nx, 1000u);
  }
  EXPECT_THROW(plan_for_table(0), InvalidArgument);
  EXPECT_THROW(plan_for_table(9), InvalidArgument);
}

TEST(Study, SingleLevelHasEmptyOrderCells) {
  StudyPlan plan = plan_for_table(4);
  plan.alphas = {0.75};
  plan.levels.resize(1);
  const auto report = run_study(plan);
  ASSERT_EQ(report.rows.size(), 1u);
  EXPECT_FALSE(report.rows[0].co_l2max);
  EXPECT_FALSE(report.rows[0].co_sup);
  const auto csv = lines(emit(report, ReportFormat::csv));
  ASSERT_EQ(csv.size(), 2u);
  EXPECT_EQ(csv[1].substr(0, 7), "0.75,1,");
  EXPECT_NE(csv[1].find(",,"), std::string::npos);
}

TEST(Emit, EmptyReportIsHeaderOnly) {
  const ConvergenceReport report;
  EXPECT_EQ(emit(report, ReportFormat::csv), std::string(csv_header) + "\n");
}

TEST(Emit, StableColumnOrder) {
  ConvergenceReport report;
  ReportRow row;
  row.alpha = 0.5;
  row.level = 2;
  row.h = 1.0 / 320;
  row.tau = 1.0 / 320;
  row.err_l2max = 1.9604e-5;
  row.co_l2max = 2.0;
  row.err_sup = 2.7882e-5;
  row.co_sup = 1.99995;
  row.seconds = 0.25;
  report.rows.push_back(row);
  const auto csv = lines(emit(report, ReportFormat::csv));
  ASSERT_EQ(csv.size(), 2u);
  EXPECT_EQ(csv[1], "0.50,2,3.12500e-03,3.12500e-03,1.96040e-05,2.00000e+00,2.78820e-05,1.99995e+00,2.50000e-01");
}

TEST(Study, DeterministicAcrossRunsAndThreadCounts) {
  StudyPlan plan = plan_for_table(2);
  plan.levels.resize(2);
  const auto a = without_timing(emit(run_study(plan, 1), ReportFormat::csv));
  const auto b = without_timing(emit(run_study(plan, 1), ReportFormat::csv));
  const auto c = without_timing(emit(run_study(plan, 4), ReportFormat::csv));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

TEST(Study, OrdersFromRoundedErrorsAgreeWithFullPrecision) {
  for (int table : {1, 4}) {
    const auto report = run_study(plan_for_table(table));
    const auto csv = lines(emit(report, ReportFormat::csv));
    for (std::size_t r = 1; r < report.rows.size(); ++r) {
      if (!report.rows[r].co_l2max) {
        continue;
      }
      // columns: alpha,level,h,tau,err_l2max,co_l2max,...
      auto field = [&](std::size_t row, int col) {
        std::istringstream in(csv[row + 1]);
        std::string cell;
        for (int c = 0; c <= col; ++c) {
          std::getline(in, cell, ',');
        }
        return std::strtod(cell.c_str(), nullptr);
      };
      const RefinementLevel rounded[] = {{field(r - 1, 3), field(r - 1, 4)}, {field(r, 3), field(r, 4)}};
      EXPECT_NEAR(convergence_order(rounded).front(), *report.rows[r].co_l2max, 1e-3) << table << " row " << r;
    }
  }
}

TEST(Study, CompactSpaceTimeOrderIsFour) {
  StudyPlan plan = plan_for_table(6);
  plan.alphas = {0.5};
  plan.levels.resize(3);
  const auto report = run_study(plan);
  for (std::size_t r = 1; r < report.rows.size(); ++r) {
    EXPECT_NEAR(*report.rows[r].co_l2max, 4.0, 0.02);
    EXPECT_NEAR(*report.rows[r].co_sup, 4.0, 0.02);
  }
  EXPECT_TRUE(report.apriori_ok());
}

TEST(Study, TableOneOrderApproachesThreeMinusAlpha) {
  const auto report = run_study(plan_for_table(1));
  ASSERT_EQ(report.rows.size(), 30u);
  EXPECT_NEAR(*report.rows[9].co_l2max, 2.10, 0.01);
  EXPECT_NEAR(report.rows[10].err_l2max, 3.756950e-3, 5e-10);
}

TEST(Emit, MarkdownMirrorsTableLayout) {
  StudyPlan plan = plan_for_table(6);
  plan.alphas = {0.5};
  plan.levels.resize(2);
  const auto md = emit(run_study(plan), ReportFormat::markdown);
  EXPECT_NE(md.find("Table 6"), std::string::npos);
  EXPECT_NE(md.find("| alpha | N | M | h | tau |"), std::string::npos);
  EXPECT_NE(md.find("| 0.50 | 10 | 100 | 1/10 | 1/100 |"), std::string::npos);
}
