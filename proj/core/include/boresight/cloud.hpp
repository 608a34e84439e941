#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "boresight/rotation.hpp"

namespace boresight {

/// One LiDAR return with the INS pose interpolated at its timestamp.
struct ScanPoint {
    Vec3 l = Vec3::Zero();                                  ///< scanner-frame coordinates [m]
    RotationMatrix ins_rotation = RotationMatrix::Identity();  ///< INS frame w.r.t. mapping frame
    Vec3 s = Vec3::Zero();                                  ///< scanner position in mapping frame [m]
};

/// Ordered scan points from one flight line. "hat" is the smaller set that is
/// matched into the "bar" set.
struct Cloud {
    std::string label;
    std::vector<ScanPoint> points;

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }
    const ScanPoint& operator[](std::size_t i) const { return points[i]; }
};

/// Axis-aligned box in the mapping frame.
struct CropBox {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Zero();

    bool contains(const Vec3& p) const noexcept {
        return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
    }
};

inline constexpr const char* kFusedHeader = "lx,ly,lz,roll_deg,pitch_deg,yaw_deg,sx,sy,sz";

/// Reads the pre-fused per-point text format (header kFusedHeader, comma
/// separated rows, '#' comment lines). Throws ParseError naming the offending line.
Cloud load_fused(const std::filesystem::path& path, std::string label = {});
Cloud read_fused(std::istream& in, std::string label = {});

/// Writes with round-trip precision. INS attitude is stored as roll/pitch/yaw degrees.
void save_fused(const Cloud& cloud, const std::filesystem::path& path);
void write_fused(const Cloud& cloud, std::ostream& out);

/// p = s + R_ins * R_boresight * l.
inline Vec3 georeference_point(const ScanPoint& p, const RotationMatrix& boresight) {
    return p.s + p.ins_rotation * (boresight * p.l);
}

std::vector<Vec3> georeference(const Cloud& cloud, const EulerAngles& boresight);

/// Keeps points whose georeferenced position (under `boresight_guess`) lies in
/// `box`. Throws EmptySelection if nothing is kept.
Cloud crop(const Cloud& cloud, const CropBox& box, const EulerAngles& boresight_guess = {});

/// Indices of the points crop() would keep, in input order.
std::vector<std::size_t> crop_indices(const Cloud& cloud, const CropBox& box,
                                      const EulerAngles& boresight_guess = {});

/// Uniform random subsample of `target` points (order preserved). A cloud with
/// no more than `target` points is returned unchanged.
Cloud decimate(const Cloud& cloud, std::size_t target, std::uint64_t seed);

// --- synthetic scenes -------------------------------------------------------

/// Opposite: two parallel lines flown in opposite directions on either side of
/// the object. Crossing: the bar line runs perpendicular to the hat line. With
/// opposite lines a combination of pitch and yaw only shows through the height
/// spread of the object, so it is weakly determined.
enum class LineLayout { Opposite, Crossing };

struct SynthConfig {
    std::size_t n_hat = 200;           ///< object points seen by the hat line
    std::size_t n_bar = 500;           ///< object points seen by the bar line
    EulerAngles boresight{};           ///< planted misalignment
    double noise_sigma = 0.0;          ///< isotropic scanner-frame noise [m]
    std::uint64_t seed = 1;
    /// Hat object points are a subset of the bar object points (same surface
    /// samples seen from both lines), so the planted angles have objective 0
    /// when noise_sigma == 0.
    bool shared_surface = false;
    std::size_t ground_hat = 0;        ///< extra ground points outside the object box
    std::size_t ground_bar = 0;
    double altitude = 40.0;            ///< flight height above ground [m]
    double line_offset = 15.0;         ///< lateral offset of each line from the object [m]
    LineLayout layout = LineLayout::Opposite;
};

struct GroundTruth {
    LineLayout layout = LineLayout::Opposite;
    EulerAngles boresight{};
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    bool shared_surface = false;
    CropBox object_box;                         ///< encloses every object point
    std::vector<std::size_t> hat_object;        ///< indices of object points in hat
    std::vector<std::size_t> bar_object;
};

struct SynthScene {
    Cloud hat;
    Cloud bar;
    GroundTruth truth;
    std::vector<Vec3> hat_world;  ///< noise-free mapping-frame positions
    std::vector<Vec3> bar_world;
};

/// Two opposite, parallel flight lines over a car-sized object made of
/// differently oriented planar patches (plus optional ground points).
/// Deterministic in `cfg.seed`. Throws InvalidArgument if n_hat > n_bar,
/// n_hat == 0 or noise_sigma < 0.
SynthScene synth_generate(const SynthConfig& cfg);

/// key=value sidecar: alpha_deg, beta_deg, gamma_deg, noise_sigma, seed,
/// shared_surface, object_box, hat_object, bar_object.
void save_ground_truth(const GroundTruth& truth, const std::filesystem::path& path);
GroundTruth load_ground_truth(const std::filesystem::path& path);

}  // namespace boresight
