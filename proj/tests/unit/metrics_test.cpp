#include <gtest/gtest.h>

#include <functional>
#include <limits>

#include "irisbench/error.hpp"
#include "irisbench/metrics.hpp"
#include "irisbench/report.hpp"
#include "oracles.hpp"

using namespace irisbench;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ErrorKind kind_of_error(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no irisbench::Error thrown";
  return ErrorKind::Parse;
}

ScoreRow row(std::uint32_t probe, std::uint32_t ref, bool genuine, double s) {
  ScoreRow r;
  r.probe = probe;
  r.reference = ref;
  r.genuine = genuine;
  r.score.similarity = s;
  return r;
}

}  // namespace

TEST(FrrAtFar, WorkedExample) {
  const ScoreSet s{{0.9, 0.8, 0.2}, {0.7, 0.3, 0.1, 0.05}};
  const auto p = frr_at_far(s, 0.25);
  EXPECT_EQ(p.threshold, 0.7);
  EXPECT_EQ(p.achieved_far, 0.25);
  EXPECT_EQ(p.frr, 1.0 / 3.0);
  const auto o = oracle::sweep_frr_at_far(s.genuine, s.impostor, 0.25);
  EXPECT_EQ(p.threshold, o.threshold);
  EXPECT_EQ(p.frr, o.frr);
}

TEST(FrrAtFar, PerfectSeparation) {
  const ScoreSet s{{0.9, 0.95}, {0.1, 0.2, 0.3, 0.4}};
  const auto p = frr_at_far(s, 0.25);
  EXPECT_EQ(p.threshold, 0.4);
  EXPECT_EQ(p.frr, 0.0);
  // Identical impostors: the only threshold meeting a small FAR is +inf.
  const auto z = frr_at_far({{0.9, 0.95}, std::vector<double>(10, 0.5)}, 0.1);
  EXPECT_EQ(z.threshold, kInf);
  EXPECT_EQ(z.achieved_far, 0.0);
  EXPECT_EQ(z.frr, 1.0);
}

TEST(FrrAtFar, TargetOneAcceptsEverything) {
  const ScoreSet s{{0.1, 0.5}, {0.3, 0.6}};
  const auto p = frr_at_far(s, 1.0);
  EXPECT_EQ(p.threshold, 0.3);
  EXPECT_EQ(p.achieved_far, 1.0);
  EXPECT_EQ(p.frr, 0.5);
}

TEST(FrrAtFar, Ties) {
  const ScoreSet s{{0.5, 0.5, 0.6}, {0.5, 0.5, 0.5, 0.2}};
  const auto p = frr_at_far(s, 0.5);
  EXPECT_EQ(p.threshold, kInf);  // t = 0.5 admits 3/4
  const auto q = frr_at_far(s, 0.75);
  EXPECT_EQ(q.threshold, 0.5);
  EXPECT_EQ(q.frr, 0.0);
}

TEST(FrrAtFar, Errors) {
  EXPECT_EQ(kind_of_error([] { frr_at_far({{0.5}, {0.1, 0.2}}, 0.1); }), ErrorKind::InsufficientImpostors);
  EXPECT_EQ(kind_of_error([] { frr_at_far({{0.5}, {}}, 0.5); }), ErrorKind::InsufficientImpostors);
  EXPECT_EQ(kind_of_error([] { frr_at_far({{}, {0.1, 0.2}}, 0.5); }), ErrorKind::EmptyGenuine);
  EXPECT_NO_THROW(frr_at_far({{0.5}, std::vector<double>(1000, 0.1)}, 1e-3));
}

TEST(FrrAtFar, RandomAgainstOracleAndMonotone) {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    ScoreSet s;
    const int ng = rng.uniform_int(1, 60), ni = rng.uniform_int(1, 300);
    const int levels = rng.uniform_int(2, 40);  // coarse values force ties
    for (int i = 0; i < ng; ++i) s.genuine.push_back(rng.uniform_int(0, levels) / double(levels) * 0.6 + 0.3);
    for (int i = 0; i < ni; ++i) s.impostor.push_back(rng.uniform_int(0, levels) / double(levels) * 0.6);
    const SortedScores sorted(s);
    double prev_frr = 2.0;
    for (double far : {1.0, 0.5, 0.1, 0.05, 0.01}) {
      const auto o = oracle::sweep_frr_at_far(s.genuine, s.impostor, far);
      if (o.insufficient) {
        EXPECT_EQ(kind_of_error([&] { frr_at_far(s, far); }), ErrorKind::InsufficientImpostors);
        continue;
      }
      const auto p = frr_at_far(s, far);
      ASSERT_EQ(p.threshold, o.threshold);
      ASSERT_EQ(p.achieved_far, o.achieved_far);
      ASSERT_EQ(p.frr, o.frr);
      ASSERT_EQ(sorted.at(far), p);
      ASSERT_LE(p.achieved_far, far);
      if (prev_frr <= 1.0) {
        ASSERT_GE(p.frr, prev_frr);
      }
      prev_frr = p.frr;
    }
  }
}

TEST(Fusion, AndTruthTable) {
  EXPECT_TRUE(dual_fuse_verification(true, true));
  EXPECT_FALSE(dual_fuse_verification(true, false));
  EXPECT_FALSE(dual_fuse_verification(false, true));
  EXPECT_FALSE(dual_fuse_verification(false, false));
  EXPECT_TRUE(dual_rank1("A", "A", "A"));
  EXPECT_FALSE(dual_rank1("A", "B", "A"));
  EXPECT_FALSE(dual_rank1("B", "A", "A"));
  EXPECT_FALSE(dual_rank1("B", "B", "A"));
}

TEST(Rank1, TopIndexTieGoesToSmallestId) {
  const std::vector<std::string> ids = {"g3", "g1", "g2"};
  EXPECT_EQ(top1_index(std::vector<double>{0.5, 0.9, 0.9}, ids), 1u);
  EXPECT_EQ(top1_index(std::vector<double>{0.9, 0.5, 0.9}, ids), 2u);
  EXPECT_EQ(top1_index(std::vector<double>{0.9, 0.5, 0.1}, ids), 0u);
}

TEST(Rank1, RandomAgainstArgmax) {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    IdentificationMatrix m;
    const int g = rng.uniform_int(1, 8), p = rng.uniform_int(0, 15);
    for (int i = 0; i < g; ++i) {
      m.gallery_ids.push_back("id" + std::to_string(rng.uniform_int(0, 999)) + "_" + std::to_string(i));
      m.gallery_classes.push_back("c" + std::to_string(i));
    }
    for (int i = 0; i < p; ++i) m.probe_classes.push_back("c" + std::to_string(rng.uniform_int(0, g - 1)));
    for (int i = 0; i < p * g; ++i) m.scores.push_back(rng.uniform_int(0, 4) / 4.0);
    std::size_t correct = 0;
    for (int i = 0; i < p; ++i) {
      int best = 0;
      for (int j = 1; j < g; ++j) {
        const double a = m.scores[i * g + j], b = m.scores[i * g + best];
        if (a > b || (a == b && m.gallery_ids[j] < m.gallery_ids[best])) best = j;
      }
      correct += m.gallery_classes[best] == m.probe_classes[i];
    }
    const double want = p == 0 ? 0.0 : double(correct) / p;
    ASSERT_EQ(rank1(m), want);
  }
  EXPECT_EQ(kind_of_error([] { rank1({}); }), ErrorKind::EmptyGallery);
}

TEST(Evaluate, VerificationSingleEye) {
  ScoreSheet sheet;
  sheet.ids = {"p", "q", "r"};
  for (double s : {0.9, 0.8, 0.2}) sheet.rows.push_back(row(0, 1, true, s));
  for (double s : {0.7, 0.3, 0.1, 0.05}) sheet.rows.push_back(row(0, 2, false, s));
  ProtocolSpec spec;
  spec.name = ProtocolName::Control;
  const std::vector<double> fars = {0.25, 0.1};
  const auto res = evaluate_verification(spec, sheet, fars);
  EXPECT_EQ(res.n_genuine, 3u);
  EXPECT_EQ(res.n_impostor, 4u);
  ASSERT_EQ(res.points.size(), 2u);
  EXPECT_EQ(res.points[0].det->frr, 1.0 / 3.0);
  EXPECT_FALSE(res.points[1].det.has_value());
  EXPECT_EQ(res.protocol, "control");
}

TEST(Evaluate, DualVerificationUsesPerEyeThresholdsAndAnd) {
  // Four genuine and four impostor pairs; left and right rows alternate.
  const double gl[] = {0.9, 0.9, 0.2, 0.8}, gr[] = {0.9, 0.1, 0.9, 0.8};
  const double il[] = {0.7, 0.1, 0.1, 0.1}, ir[] = {0.1, 0.6, 0.1, 0.1};
  ScoreSheet sheet;
  sheet.ids = {"a", "b"};
  for (int i = 0; i < 4; ++i) {
    sheet.rows.push_back(row(0, 1, true, gl[i]));
    sheet.rows.push_back(row(0, 1, true, gr[i]));
  }
  for (int i = 0; i < 4; ++i) {
    sheet.rows.push_back(row(0, 1, false, il[i]));
    sheet.rows.push_back(row(0, 1, false, ir[i]));
  }
  ProtocolSpec spec;
  spec.name = ProtocolName::Fix;
  spec.eye_mode = EyeMode::Dual;
  const std::vector<double> fars = {0.25};
  const auto res = evaluate_verification(spec, sheet, fars);
  ASSERT_EQ(res.points.size(), 1u);
  const auto& op = res.points[0];
  // Left threshold 0.7 (one of four impostors), right threshold 0.6.
  EXPECT_EQ(op.det->threshold, 0.7);
  EXPECT_EQ(*op.threshold_r, 0.6);
  // Both impostors that pass one eye fail the other: fused FAR 0.
  EXPECT_EQ(op.det->achieved_far, 0.0);
  // Genuine pairs 1 and 2 fail one eye each.
  EXPECT_EQ(op.det->frr, 0.5);
}

TEST(Evaluate, DualIdentificationNeedsBothEyes) {
  // Three probes against a two-subject gallery; dual rows alternate L/R.
  ScoreSheet sheet;
  sheet.ids = {"pL0", "pR0", "pL1", "pR1", "pL2", "pR2", "gAL", "gAR", "gBL", "gBR"};
  auto add = [&](std::uint32_t p, bool genuine, double l, double r, std::uint32_t g) {
    sheet.rows.push_back(row(p, g, genuine, l));
    sheet.rows.push_back(row(p + 1, g + 1, genuine, r));
  };
  // probe 0 (subject A): both eyes prefer A.
  add(0, true, 0.9, 0.9, 6);
  add(0, false, 0.1, 0.2, 8);
  // probe 1 (subject A): right eye prefers B.
  add(2, true, 0.9, 0.3, 6);
  add(2, false, 0.2, 0.8, 8);
  // probe 2 (subject B): both prefer B.
  add(4, false, 0.1, 0.1, 6);
  add(4, true, 0.7, 0.6, 8);
  ProtocolSpec spec;
  spec.task = Task::Identification;
  spec.eye_mode = EyeMode::Dual;
  const auto res = evaluate_identification(spec, sheet);
  EXPECT_EQ(*res.rank1, 2.0 / 3.0);
  spec.eye_mode = EyeMode::Left;
  ScoreSheet left;
  left.ids = sheet.ids;
  for (std::size_t i = 0; i < sheet.rows.size(); i += 2) left.rows.push_back(sheet.rows[i]);
  EXPECT_EQ(*evaluate_identification(spec, left).rank1, 1.0);
}

TEST(Report, JsonRoundTripIsBitExact) {
  EvalResult a;
  a.protocol = "any";
  a.eye_mode = "dual";
  a.task = "verification";
  a.n_genuine = 12345;
  a.n_impostor = 678901;
  OperatingPoint p1;
  p1.far_target = 1e-1;
  p1.det = DetPoint{1e-1, 0.09999999999999999, 1.0 / 3.0, 0.71234567890123456};
  p1.threshold_r = 0.1 + 0.2;
  OperatingPoint p2;
  p2.far_target = 1e-3;
  p2.det = DetPoint{1e-3, 0.0, 1.0, kInf};
  p2.threshold_r = kInf;
  OperatingPoint p3;
  p3.far_target = 1e-5;
  a.points = {p1, p2, p3};
  EvalResult b;
  b.protocol = "control";
  b.eye_mode = "left";
  b.task = "identification";
  b.n_genuine = 3;
  b.n_impostor = 9;
  b.rank1 = 2.0 / 3.0;
  const std::vector<EvalResult> results = {a, b};
  const auto text = report_json(results);
  EXPECT_EQ(parse_report_json(text), results);
  EXPECT_EQ(report_json(parse_report_json(text)), text);
  EXPECT_TRUE(parse_report_json(report_json({})).empty());
}

TEST(Report, TableHasOneColumnPerFar) {
  EvalResult a;
  a.protocol = "control";
  a.eye_mode = "left";
  a.task = "verification";
  for (double far : {1e-1, 1e-3, 1e-5}) {
    OperatingPoint p;
    p.far_target = far;
    if (far > 1e-5) p.det = DetPoint{far, far / 2, 0.125, 0.5};
    a.points.push_back(p);
  }
  const auto table = report_table({a});
  const auto header = table.substr(0, table.find('\n'));
  EXPECT_NE(header.find("FRR@0.1 "), std::string::npos) << table;
  EXPECT_NE(header.find("FRR@0.001"), std::string::npos) << table;
  EXPECT_NE(header.find("FRR@1e-05"), std::string::npos) << table;
  EXPECT_LT(header.find("FRR@0.1 "), header.find("FRR@1e-05"));
  EXPECT_EQ(header.find("rank"), std::string::npos);
  EXPECT_NE(table.find("control"), std::string::npos);
  EXPECT_NE(table.find("12.50"), std::string::npos);
  EXPECT_NO_THROW(report_table({}));
}
