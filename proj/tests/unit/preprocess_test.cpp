#include <gtest/gtest.h>

#include <cmath>

#include "irisbench/error.hpp"
#include "irisbench/preprocess.hpp"
#include "oracles.hpp"

using namespace irisbench;

namespace {

Image8 random_image(Rng& rng, int w, int h) {
  Image8 img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(x, y) = static_cast<std::uint8_t>(rng.uniform_int(1, 255));
  return img;
}

}  // namespace

TEST(Crop, WindowIsExpandedSquare) {
  const auto w = crop_window({220, 230, 200, 180}, {});
  EXPECT_DOUBLE_EQ(w.w, 240.0);
  EXPECT_DOUBLE_EQ(w.h, 240.0);
  EXPECT_DOUBLE_EQ(w.x, 200.0);
  EXPECT_DOUBLE_EQ(w.y, 200.0);
  EXPECT_DOUBLE_EQ(w.x + w.w, 440.0);
}

TEST(Crop, IdentityWhenWindowIsTheImage) {
  Rng rng(1);
  const auto img = random_image(rng, 64, 64);
  EXPECT_EQ(bbox_crop(img, {0, 0, 64, 64}, {1.0, 64}), img);
}

TEST(Crop, MatchesPaddedOracle) {
  Rng rng(2);
  const auto img = random_image(rng, 90, 70);
  const oracle::PaddedImage padded(img, 64);
  const BBox box{-10, 20, 50, 40};
  const CropConfig cfg{1.5, 37};
  const auto out = bbox_crop(img, box, cfg);
  const double side = 50 * 1.5;
  const double x0 = 15 - side / 2, y0 = 40 - side / 2;
  for (int j = 0; j < cfg.out_size; ++j)
    for (int i = 0; i < cfg.out_size; ++i) {
      const double v = padded.sample(x0 + (i + 0.5) * side / cfg.out_size - 0.5,
                                     y0 + (j + 0.5) * side / cfg.out_size - 0.5);
      ASSERT_LE(std::abs(out.at(i, j) - v), 0.5 + 1e-9) << i << "," << j;
    }
}

TEST(Crop, LeftEdgeIsZeroFilled) {
  Image8 img(100, 100, 200);
  // Window [-40, 60): the first 40 source columns are outside the image.
  const auto out = bbox_crop(img, {-30, 0, 80, 100}, {1.0, 100});
  for (int y = 0; y < 100; ++y) {
    for (int x = 0; x < 40; ++x) ASSERT_EQ(out.at(x, y), 0) << x;
    for (int x = 40; x < 100; ++x) ASSERT_EQ(out.at(x, y), 200) << x;
  }
  // Half a pixel off the grid, the edge column blends zero and 200.
  EXPECT_EQ(bbox_crop(img, {-29.5, 0, 80, 100}, {1.0, 100}).at(39, 50), 100);
}

TEST(Crop, RejectsDisjointAndDegenerateBoxes) {
  Image8 img(50, 50, 1);
  try {
    bbox_crop(img, {60, 0, 10, 10});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoOverlap);
  }
  EXPECT_THROW(bbox_crop(img, {0, 0, 0, 10}), Error);
  EXPECT_THROW(bbox_crop(img, {0, 0, 10, 10}, {0.5, 10}), Error);
}

TEST(RubberSheet, FirstCellSamplesNearPupil) {
  Image8 img(640, 640);
  for (int y = 0; y < 640; ++y)
    for (int x = 0; x < 640; ++x) img.at(x, y) = static_cast<std::uint8_t>(x % 256);
  const Ellipse pupil{320, 320, 50, 50, 0}, iris{320, 320, 150, 150, 0};
  const auto n = rubber_sheet(img, pupil, iris, {});
  EXPECT_EQ(n.texture.width(), kNormCols);
  EXPECT_EQ(n.texture.height(), kNormRows);
  // Row 0, column 0: theta = 0, t = 1/128, x = 370 + 100 / 128.
  const double x = 370.0 + 100.0 / 128.0;
  const double expected = oracle::PaddedImage(img, 1).sample(x, 320.0) / 255.0;
  EXPECT_NEAR(n.texture.at(0, 0), expected, 1e-6);
  EXPECT_NEAR(n.texture.at(0, 0) * 255.0, 114.78125, 1e-4);
  for (int r = 0; r < kNormRows; ++r)
    for (int c = 0; c < kNormCols; ++c) ASSERT_EQ(n.validity.at(c, r), 1);
}

TEST(RubberSheet, ImageRotationShiftsColumns) {
  // A smooth angular pattern around the center; rotating it by
  // k sheet-column angles should shift the sheet by k columns.
  const int k = 4;
  const double dtheta = 2 * std::numbers::pi * k / kNormCols;
  auto make = [&](double offset) {
    Image8 img(640, 640);
    for (int y = 0; y < 640; ++y)
      for (int x = 0; x < 640; ++x) {
        const double ang = std::atan2(320.0 - y, x - 320.0) - offset;
        img.at(x, y) = static_cast<std::uint8_t>(std::lround(127.5 + 100 * std::cos(3 * ang)));
      }
    return img;
  };
  const Ellipse pupil{320, 320, 40, 40, 0}, iris{320, 320, 140, 140, 0};
  const auto a = rubber_sheet(make(0.0), pupil, iris, {});
  const auto b = rubber_sheet(make(dtheta), pupil, iris, {});
  double worst = 0;
  for (int r = 0; r < kNormRows; ++r)
    for (int c = 0; c < kNormCols; ++c)
      worst = std::max(worst, static_cast<double>(std::abs(b.texture.at((c + k) % kNormCols, r) - a.texture.at(c, r))));
  EXPECT_LT(worst, 0.05);
}

TEST(RubberSheet, FullyOccludedIsInvalid) {
  Image8 img(640, 640, 100), occ(640, 640, 1);
  const auto n = rubber_sheet(img, {320, 320, 50, 40, 0.3}, {320, 320, 120, 100, 0.3}, occ);
  for (int r = 0; r < kNormRows; ++r)
    for (int c = 0; c < kNormCols; ++c) ASSERT_EQ(n.validity.at(c, r), 0);
}

TEST(RubberSheet, OutsideImageIsInvalid) {
  Image8 img(640, 640, 100);
  const auto n = rubber_sheet(img, {20, 320, 30, 30, 0}, {20, 320, 100, 100, 0}, {});
  // theta = pi points left, past the image edge at the outer rows.
  EXPECT_EQ(n.validity.at(kNormCols / 2, kNormRows - 1), 0);
  EXPECT_EQ(n.validity.at(0, kNormRows - 1), 1);
}

TEST(RubberSheet, RejectsBadGeometry) {
  Image8 img(64, 64, 0);
  try {
    rubber_sheet(img, {32, 32, 20, 20, 0}, {32, 32, 10, 10, 0}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateGeometry);
  }
}

TEST(Resize, IdentityAndConstant) {
  ImageF img(5, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 5; ++x) img.at(x, y) = static_cast<float>(x * 10 + y);
  EXPECT_EQ(resize_bilinear(img, 5, 4), img);
  ImageF flat(7, 3, 0.25f);
  const auto r = resize_bilinear(flat, 16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) ASSERT_FLOAT_EQ(r.at(x, y), 0.25f);
}
