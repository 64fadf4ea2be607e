#include <gtest/gtest.h>

#include <cmath>

#include "irisbench/error.hpp"
#include "irisbench/mask.hpp"
#include "irisbench/quality.hpp"
#include "oracles.hpp"

using namespace irisbench;

namespace {

// Circular iris of radius 60 at (320, 320), pupil radius 30, clear masks.
SampleRecord round_eye(int gaze = 5) {
  auto r = oracle::make_record("S1", Eye::Left, gaze, 0, 0);
  Annotation a;
  a.iris_ellipse = {320, 320, 60, 60, 0.0};
  a.pupil_ellipse = {320, 320, 30, 30, 0.0};
  a.iris_bbox = a.iris_ellipse.bounding_box();
  a.ocular_bbox = {150, 200, 340, 240};
  a.occlusion_mask.mask = RleMask(kImageSize, kImageSize);
  a.reflection_mask.mask = RleMask(kImageSize, kImageSize);
  r.annotation = a;
  return r;
}

bool in_circle(int x, int y) { return (x - 320) * (x - 320) + (y - 320) * (y - 320) <= 3600; }

}  // namespace

TEST(Quality, CleanKeepsValidAnnotationsInOrder) {
  std::vector<SampleRecord> records;
  for (int i = 0; i < 6; ++i) {
    auto r = round_eye();
    r.sample_id += std::to_string(i);
    if (i == 1) r.annotation.reset();
    if (i == 4) r.annotation->pupil_ellipse.a = 70;
    records.push_back(r);
  }
  const auto result = clean(records);
  EXPECT_EQ(result.dropped, 2u);
  ASSERT_EQ(result.kept.size(), 4u);
  EXPECT_EQ(result.kept[0].sample_id, records[0].sample_id);
  EXPECT_EQ(result.kept[1].sample_id, records[2].sample_id);
  EXPECT_EQ(result.kept[3].sample_id, records[5].sample_id);
  EXPECT_TRUE(clean({}).kept.empty());
}

TEST(Quality, CleanCenterCaptureScores) {
  const auto q = score_quality(round_eye());
  EXPECT_EQ(q.eyelid_occ, 0.0);
  EXPECT_EQ(q.eyelash_occ, 0.0);
  EXPECT_DOUBLE_EQ(q.pupil_ratio, 0.5);
  EXPECT_EQ(q.gaze_dev, 0.0);
  EXPECT_EQ(q.reflection, 0.0);
}

TEST(Quality, GazeDeviationEndpoints) {
  EXPECT_EQ(gaze_deviation(5), 0.0);
  for (int g : {1, 3, 7, 9}) EXPECT_DOUBLE_EQ(gaze_deviation(g), 1.0);
  EXPECT_LT(gaze_deviation(2), gaze_deviation(4));  // 10 deg pitch vs 15 deg yaw
  EXPECT_DOUBLE_EQ(gaze_deviation(4), gaze_deviation(6));
}

TEST(Quality, HalfLidCoverage) {
  auto r = round_eye();
  Image8 raster(kImageSize, kImageSize, 0);
  std::size_t inside = 0, covered = 0;
  for (int y = 0; y < kImageSize; ++y)
    for (int x = 0; x < kImageSize; ++x) {
      if (y < 320) raster.at(x, y) = static_cast<std::uint8_t>(OcclusionLabel::Eyelid);
      if (in_circle(x, y)) {
        ++inside;
        if (y < 320) ++covered;
      }
    }
  r.annotation->occlusion_mask.mask = RleMask::from_raster(raster);
  const auto q = score_quality(r);
  const double expected = static_cast<double>(covered) / static_cast<double>(inside);
  EXPECT_NEAR(q.eyelid_occ, 0.5, 0.02);
  EXPECT_DOUBLE_EQ(q.eyelid_occ, expected);
  EXPECT_EQ(q.eyelash_occ, 0.0);
}

TEST(Quality, LashAndReflectionCountedSeparately) {
  auto r = round_eye();
  Image8 occ(kImageSize, kImageSize, 0), refl(kImageSize, kImageSize, 0);
  std::size_t inside = 0, lash = 0, glare = 0;
  for (int y = 0; y < kImageSize; ++y)
    for (int x = 0; x < kImageSize; ++x) {
      const bool l = x < 300;
      const bool g = (x - 340) * (x - 340) + (y - 300) * (y - 300) < 100;
      if (l) occ.at(x, y) = static_cast<std::uint8_t>(OcclusionLabel::Eyelash);
      if (g) refl.at(x, y) = 1;
      if (in_circle(x, y)) {
        ++inside;
        lash += l;
        glare += g;
      }
    }
  r.annotation->occlusion_mask.mask = RleMask::from_raster(occ);
  r.annotation->reflection_mask.mask = RleMask::from_raster(refl);
  const auto q = score_quality(r);
  EXPECT_EQ(q.eyelid_occ, 0.0);
  EXPECT_DOUBLE_EQ(q.eyelash_occ, static_cast<double>(lash) / static_cast<double>(inside));
  EXPECT_DOUBLE_EQ(q.reflection, static_cast<double>(glare) / static_cast<double>(inside));
}

TEST(Quality, MissingAnnotationThrows) {
  auto r = round_eye();
  r.annotation.reset();
  try {
    score_quality(r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingAnnotation);
  }
}

TEST(Categorize, StrictlyAboveThreshold) {
  const QualityThresholds t;
  QualityScores s{0.20, 0.15, 0.62, 0.90, 0.10};
  auto c = categorize(s, t);
  EXPECT_EQ(c.category, Category::Standard);
  EXPECT_TRUE(c.exceeded.empty());

  s.pupil_ratio = std::nextafter(0.62, 1.0);
  c = categorize(s, t);
  EXPECT_EQ(c.category, Category::Challenging);
  EXPECT_EQ(c.exceeded, QualityFlags{QualityDim::PupilRatio});

  s = {0.5, 0.0, 0.0, 1.0, 0.0};
  c = categorize(s, t);
  EXPECT_EQ(c.exceeded, (QualityFlags{QualityDim::Eyelid, QualityDim::GazeDev}));
}

TEST(Categorize, RaisingAScoreNeverMakesItStandard) {
  Rng rng(5);
  const QualityThresholds t;
  for (int i = 0; i < 2000; ++i) {
    QualityScores s{rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()};
    const auto before = categorize(s, t);
    double* dims[] = {&s.eyelid_occ, &s.eyelash_occ, &s.pupil_ratio, &s.gaze_dev, &s.reflection};
    double* d = dims[rng.uniform_int(0, 4)];
    *d = *d + (1.0 - *d) * rng.uniform();
    const auto after = categorize(s, t);
    if (before.category == Category::Challenging) EXPECT_EQ(after.category, Category::Challenging);
    EXPECT_TRUE(before.exceeded.subset_of(after.exceeded));
  }
}

TEST(Thresholds, ParseOverridesDefaults) {
  const auto t = QualityThresholds::parse("# tuned\neyelid=0.3\n\npupil_ratio = 0.5\n");
  EXPECT_DOUBLE_EQ(t.eyelid, 0.3);
  EXPECT_DOUBLE_EQ(t.pupil_ratio, 0.5);
  EXPECT_DOUBLE_EQ(t.eyelash, 0.15);
  EXPECT_TRUE(t.valid());
  EXPECT_THROW(QualityThresholds::parse("nose=0.1"), Error);
  EXPECT_THROW(QualityThresholds::parse("eyelid"), Error);
  EXPECT_THROW(QualityThresholds::parse("eyelid=1.5"), Error);
}

TEST(Quality, AssessMatchesScoreAndWorkers) {
  std::vector<SampleRecord> a;
  for (int g = 1; g <= 9; ++g) {
    auto r = round_eye(g);
    r.sample_id += "_" + std::to_string(g);
    a.push_back(r);
  }
  auto b = a;
  assess_quality(a, {}, {}, 1);
  assess_quality(b, {}, {}, 4);
  EXPECT_EQ(a, b);
  for (const auto& r : a) {
    EXPECT_EQ(*r.quality, score_quality(r));
    EXPECT_EQ(*r.category, r.gaze_point == 1 || r.gaze_point == 3 || r.gaze_point == 7 || r.gaze_point == 9
                               ? Category::Challenging
                               : Category::Standard);
  }
}
