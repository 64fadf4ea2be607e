#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "irisbench/raster.hpp"
#include "irisbench/records.hpp"

namespace irisbench {

/// Per-capture probabilities of quality-lowering (but annotatable) effects.
struct QualityDefectRates {
  double droop = 0.03;       // upper lid lowered over the iris
  double heavy_lash = 0.03;  // dense, long eyelashes over the iris
  double glare = 0.03;       // large specular blob on the iris
};

struct SynthConfig {
  double camera_tilt_deg = 20.0;
  double gaze_yaw_deg = 15.0;    // horizontal offset between adjacent gaze columns
  double gaze_pitch_deg = 10.0;  // vertical offset between adjacent gaze rows
  double noise_sigma = 3.0;      // sensor noise, gray levels
  QualityDefectRates quality;
};

/// Annotation-breaking acquisition failures, removed by cleaning.
enum class CleaningDefect : std::uint8_t { None, ClosedEye, OutOfFrame, MotionBlur };

struct CleaningProfile {
  double closed_eye = 0.03;
  double out_of_frame = 0.02;
  double motion_blur = 0.018;
};

struct CaptureParams {
  Eye eye = Eye::Left;
  int gaze_point = kCenterGazePoint;
  int brightness_level = 0;
  int frame_idx = 0;
  std::uint64_t noise_seed = 0;
  bool droop = false;
  bool heavy_lash = false;
  bool glare = false;
  CleaningDefect defect = CleaningDefect::None;

  bool operator==(const CaptureParams&) const = default;
};

/// Seeded band-limited iris texture over (radial coordinate in [0,1],
/// angle in radians), tabulated and zero-mean / unit-variance. A second
/// coarse field (1-4 cycles per circle) models large pigment patches.
class IrisTexture {
 public:
  static constexpr int kRadialSamples = 48;
  static constexpr int kAngularSamples = 1024;

  static IrisTexture generate(std::uint64_t seed);

  double sample(double radial, double angle) const noexcept { return lookup(table_, radial, angle); }
  double pigment(double radial, double angle) const noexcept { return lookup(pigment_, radial, angle); }

 private:
  static double lookup(const std::vector<float>& table, double radial, double angle) noexcept;

  std::vector<float> table_;    // (kRadialSamples + 1) x kAngularSamples
  std::vector<float> pigment_;  // same shape
};

/// Everything identity-specific about a synthetic subject, frozen from a
/// single 64-bit seed.
struct SubjectModel {
  std::string subject_id;
  std::uint64_t identity_seed = 0;
  double iris_radius = 96.0;
  Point2 eye_offset;
  double skin_level = 150.0;
  double sclera_level = 205.0;
  double iris_level[2] = {95.0, 95.0};
  double iris_contrast[2] = {30.0, 30.0};
  double pigment_contrast[2] = {20.0, 20.0};
  double aperture_upper = 0.9;
  double aperture_lower = 0.95;
  double lid_half_width = 2.0;  // in iris radii

  static SubjectModel from_seed(std::string subject_id, std::uint64_t identity_seed);

  std::uint64_t texture_seed(Eye eye) const noexcept;
  /// Shared, cached texture for one eye.
  std::shared_ptr<const IrisTexture> texture(Eye eye) const;
};

/// Pupil-to-iris diameter ratio for a display brightness level:
/// 0.65 at level 0 falling linearly to 0.30 at level 10.
double pupil_ratio_for_level(int level) noexcept;

/// Minor/major axis ratio of the imaged iris: cos(tilt) * cos(yaw) * cos(pitch).
double off_axis_ratio(int gaze_point, const SynthConfig& config) noexcept;

/// Gaze offsets (yaw, pitch) in degrees for a gaze point; point 5 is (0, 0)
/// and point 1 is top-left.
std::pair<double, double> gaze_angles_deg(int gaze_point, const SynthConfig& config) noexcept;

/// Ground truth annotation of a capture without rasterizing the image.
Annotation annotate_ocular(const SubjectModel& subject, const CaptureParams& params, const SynthConfig& config);

/// Renders the 640x640 capture and its exact ground truth.
std::pair<Image8, Annotation> render_ocular(const SubjectModel& subject, const CaptureParams& params,
                                            const SynthConfig& config);

/// Self-describing reference ("synth:...") from which the pipeline
/// re-renders an image on demand instead of reading a file.
struct SynthRef {
  std::uint64_t identity_seed = 0;
  CaptureParams params;
  SynthConfig config;

  std::string format() const;
  static std::optional<SynthRef> parse(std::string_view text);
  static bool is_synth_ref(std::string_view text) noexcept;
};

struct SessionOptions {
  std::uint64_t seed = 0;  // corpus seed; per-capture noise and defects derive from it
  SynthConfig config;
};

/// All 9 gaze points x 11 brightness levels x 5 frames x 2 eyes for one
/// subject, ordered by (eye, gaze_point, level, frame), with annotations.
/// Image refs are synth refs; see materialize_images to write files.
std::vector<SampleRecord> generate_session(const SubjectModel& subject, const SessionOptions& options);

/// Subjects S0000.. with identity seeds drawn from `options.seed`, sorted
/// by sample order.
std::vector<SampleRecord> generate_corpus(int subject_count, const SessionOptions& options, unsigned workers = 1);

/// Marks a seeded subset of records with acquisition failures and drops
/// their annotations. Each record's draw depends only on (seed, sample_id).
std::vector<SampleRecord> inject_degradations(std::vector<SampleRecord> records, const CleaningProfile& profile,
                                              std::uint64_t seed);

/// Renders every synth-ref record into `out_dir` (PGM or PNG by
/// extension) and rewrites its image_ref to the relative file path.
void materialize_images(std::span<SampleRecord> records, const std::filesystem::path& out_dir,
                        const std::string& extension = ".pgm", unsigned workers = 1);

/// Renders the image behind a synth ref.
Image8 render_synth_ref(const SynthRef& ref);

}  // namespace irisbench
