#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "irisbench/preprocess.hpp"
#include "irisbench/templates.hpp"

namespace irisbench {

/// Phase-quadrant iris code: per grid position and wavelength, the signs of
/// the real and imaginary responses of a 1-D complex Gabor filter run
/// along the angular axis of the band-averaged normalized iris.
struct GaborConfig {
  int grid_rows = 8;
  int grid_cols = 128;
  std::vector<double> wavelengths = {18.0, 36.0};  // pixels along the angular axis
  double sigma_per_wavelength = 0.5;
  double min_valid_fraction = 0.7;

  CodeLayout layout() const noexcept {
    return {static_cast<std::uint32_t>(grid_rows), static_cast<std::uint32_t>(grid_cols),
            static_cast<std::uint32_t>(2 * wavelengths.size())};
  }
};

/// Ordinal code: sign of zero-sum multi-lobe differential filters.
struct OrdinalConfig {
  int grid_rows = 8;
  int grid_cols = 128;
  double lobe_spacing = 12.0;
  double lobe_sigma = 4.0;
  double min_valid_fraction = 0.7;

  CodeLayout layout() const noexcept {
    return {static_cast<std::uint32_t>(grid_rows), static_cast<std::uint32_t>(grid_cols), 2};
  }
};

IrisCode gabor_encode(const NormalizedIris& norm, const GaborConfig& config = {});
IrisCode ordinal_encode(const NormalizedIris& norm, const OrdinalConfig& config = {});

inline constexpr int kEmbedGrid = 16;

/// Deterministic stand-in extractor: area-average to 16x16, subtract the
/// mean, L2-normalize. A constant input maps to the first basis vector.
Embedding reference_embed(const Image8& image);
Embedding reference_embed(const ImageF& image);

/// Reads an embedding template store, renormalizing vectors whose norm is
/// off by more than 1e-6.
std::map<std::string, Embedding> import_embeddings(const std::filesystem::path& path);

}  // namespace irisbench
