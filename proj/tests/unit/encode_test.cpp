#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "irisbench/encode.hpp"
#include "irisbench/error.hpp"
#include "irisbench/match.hpp"
#include "irisbench/synth.hpp"
#include "oracles.hpp"

using namespace irisbench;

namespace {

NormalizedIris random_sheet(Rng& rng) {
  NormalizedIris n{ImageF(kNormCols, kNormRows), Image8(kNormCols, kNormRows, 1)};
  // Smooth random signal: a few random sinusoids per row band plus noise.
  std::vector<double> amp(12), freq(12), phase(12);
  for (int k = 0; k < 12; ++k) {
    amp[k] = rng.uniform(0.02, 0.1);
    freq[k] = rng.uniform_int(4, 40);
    phase[k] = rng.uniform(0, 2 * std::numbers::pi);
  }
  for (int r = 0; r < kNormRows; ++r)
    for (int c = 0; c < kNormCols; ++c) {
      double v = 0.5;
      for (int k = 0; k < 12; ++k)
        v += amp[k] * std::sin(2 * std::numbers::pi * freq[k] * c / kNormCols + phase[k] + 0.05 * r * k);
      n.texture.at(c, r) = static_cast<float>(v + 0.01 * rng.normal());
    }
  return n;
}

NormalizedIris shift_columns(const NormalizedIris& n, int k) {
  NormalizedIris out = n;
  for (int r = 0; r < n.texture.height(); ++r)
    for (int c = 0; c < n.texture.width(); ++c) {
      const int src = ((c - k) % n.texture.width() + n.texture.width()) % n.texture.width();
      out.texture.at(c, r) = n.texture.at(src, r);
      out.validity.at(c, r) = n.validity.at(src, r);
    }
  return out;
}

}  // namespace

TEST(Gabor, DefaultLayoutHas4096Bits) {
  Rng rng(1);
  const auto code = gabor_encode(random_sheet(rng));
  EXPECT_EQ(code.kind, CodeKind::Gabor);
  EXPECT_EQ(code.layout.bit_count(), 4096u);
  EXPECT_EQ(code.mask.count(), 4096u);
  const auto ones = code.bits.count();
  EXPECT_GT(ones, 1024u);
  EXPECT_LT(ones, 3072u);
}

TEST(Gabor, NoValidPixelsGivesEmptyMask) {
  Rng rng(2);
  auto n = random_sheet(rng);
  n.validity = Image8(kNormCols, kNormRows, 0);
  EXPECT_EQ(gabor_encode(n).mask.count(), 0u);
  EXPECT_EQ(ordinal_encode(n).mask.count(), 0u);
}

TEST(Gabor, SheetShiftRotatesCode) {
  Rng rng(3);
  const auto n = random_sheet(rng);
  const auto step = kNormCols / GaborConfig{}.grid_cols;
  const auto a = gabor_encode(n);
  const auto b = gabor_encode(shift_columns(n, 4 * step));
  EXPECT_EQ(b, a.rotated(4));
  const auto o = ordinal_encode(n);
  EXPECT_EQ(ordinal_encode(shift_columns(n, -3 * step)), o.rotated(-3));
}

TEST(Gabor, RejectsBadGrid) {
  Rng rng(4);
  GaborConfig cfg;
  cfg.grid_cols = 100;
  EXPECT_THROW(gabor_encode(random_sheet(rng), cfg), Error);
  cfg.grid_cols = 128;
  cfg.grid_rows = 7;
  EXPECT_THROW(gabor_encode(random_sheet(rng), cfg), Error);
}

TEST(Ordinal, ConstantInputGivesZeroBits) {
  NormalizedIris n{ImageF(kNormCols, kNormRows, 0.37f), Image8(kNormCols, kNormRows, 1)};
  const auto code = ordinal_encode(n);
  EXPECT_EQ(code.kind, CodeKind::Ordinal);
  EXPECT_EQ(code.bits.count(), 0u);
  EXPECT_EQ(code.mask.count(), code.layout.bit_count());
}

TEST(Ordinal, OffsetInvariant) {
  Rng rng(5);
  const auto n = random_sheet(rng);
  auto m = n;
  for (int r = 0; r < kNormRows; ++r)
    for (int c = 0; c < kNormCols; ++c) m.texture.at(c, r) += 0.25f;
  const auto a = ordinal_encode(n), b = ordinal_encode(m);
  // Float rounding can flip bits whose response is essentially zero.
  std::size_t differ = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) differ += a.bits.get(i) != b.bits.get(i);
  EXPECT_LE(differ, 4u);
}

TEST(Ordinal, StepEdgePolarity) {
  // Bright left of column 256, dark to the right: the dilobe filter at
  // column 256 sees left minus right > 0.
  NormalizedIris n{ImageF(kNormCols, kNormRows), Image8(kNormCols, kNormRows, 1)};
  for (int r = 0; r < kNormRows; ++r)
    for (int c = 0; c < kNormCols; ++c) n.texture.at(c, r) = c < 256 ? 0.8f : 0.2f;
  const auto code = ordinal_encode(n);
  const std::size_t j = 256 / (kNormCols / OrdinalConfig{}.grid_cols);
  EXPECT_TRUE(code.bits.get(j * 2));
  for (int r = 0; r < kNormRows; ++r)
    for (int c = 0; c < kNormCols; ++c) n.texture.at(c, r) = c < 256 ? 0.2f : 0.8f;
  EXPECT_FALSE(ordinal_encode(n).bits.get(j * 2));
}

TEST(Embed, ConstantImageGivesFirstBasisVector) {
  const auto e = reference_embed(Image8(40, 30, 77));
  ASSERT_EQ(e.dims(), static_cast<std::size_t>(kEmbedGrid * kEmbedGrid));
  EXPECT_EQ(e.values[0], 1.0);
  for (std::size_t i = 1; i < e.dims(); ++i) ASSERT_EQ(e.values[i], 0.0);
}

TEST(Embed, UnitNormAndAreaAverage) {
  Rng rng(6);
  Image8 img(64, 32);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 64; ++x) img.at(x, y) = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  const auto e = reference_embed(img);
  EXPECT_NEAR(e.norm(), 1.0, 1e-12);
  EXPECT_TRUE(e.valid());
  // Oracle: 4x2 block means, centered and normalized.
  std::vector<double> v(kEmbedGrid * kEmbedGrid);
  double mean = 0;
  for (int i = 0; i < kEmbedGrid; ++i)
    for (int j = 0; j < kEmbedGrid; ++j) {
      double s = 0;
      for (int y = 2 * i; y < 2 * i + 2; ++y)
        for (int x = 4 * j; x < 4 * j + 4; ++x) s += img.at(x, y);
      v[i * kEmbedGrid + j] = s / 8;
      mean += s / 8;
    }
  mean /= v.size();
  double norm = 0;
  for (double& x : v) {
    x -= mean;
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (std::size_t i = 0; i < v.size(); ++i) ASSERT_NEAR(e.values[i], v[i] / norm, 1e-12);
}

TEST(Embed, SameIdentityIsSimilar) {
  const auto subject = SubjectModel::from_seed("S0001", 99);
  CaptureParams p;
  p.gaze_point = 5;
  p.brightness_level = 5;
  p.noise_seed = 1;
  const auto [img0, ann0] = render_ocular(subject, p, {});
  p.frame_idx = 1;
  p.noise_seed = 2;
  const auto [img1, ann1] = render_ocular(subject, p, {});
  const auto a = reference_embed(bbox_crop(img0, ann0.iris_bbox));
  const auto b = reference_embed(bbox_crop(img1, ann1.iris_bbox));
  EXPECT_GT(cosine_match(a, b).similarity, 0.9);
}

TEST(ImportEmbeddings, RoundTripAndRenormalize) {
  const auto dir = oracle::scratch_dir("import");
  TemplateMap m;
  m["unit"] = Embedding{{0.6, 0.8, 0.0}};
  m["double"] = Embedding{{2.0, 0.0, 0.0}};
  save_templates(m, dir / "e.irtb");
  const auto got = import_embeddings(dir / "e.irtb");
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got.at("unit"), std::get<Embedding>(m["unit"]));
  EXPECT_EQ(got.at("double").values, (std::vector<double>{1.0, 0.0, 0.0}));

  std::ofstream(dir / "empty.irtb").close();
  EXPECT_TRUE(import_embeddings(dir / "empty.irtb").empty());

  Rng rng(7);
  TemplateMap codes;
  codes["a"] = oracle::random_code(rng, {2, 8, 4});
  save_templates(codes, dir / "bad.irtb");
  try {
    import_embeddings(dir / "bad.irtb");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimMismatch);
  }
  std::filesystem::remove_all(dir);
}
