#include "boresight/cloud.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <string_view>

#include "boresight/errors.hpp"

namespace boresight {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view field, std::size_t line) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value))
        throw ParseError("invalid number '" + std::string(field) + "'", line);
    return value;
}

bool orthonormal(const RotationMatrix& r) {
    return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-9 &&
           std::abs(r.determinant() - 1.0) <= 1e-9;
}

}  // namespace

Cloud read_fused(std::istream& in, std::string label) {
    Cloud cloud;
    cloud.label = std::move(label);
    std::string raw;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != kFusedHeader)
                throw ParseError("expected header '" + std::string(kFusedHeader) + "'", line_no);
            header_seen = true;
            continue;
        }

        double v[9];
        std::size_t count = 0;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            const auto field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
            if (count == 9) throw ParseError("expected 9 fields, found more", line_no);
            v[count++] = parse_double(field, line_no);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (count != 9)
            throw ParseError("expected 9 fields, found " + std::to_string(count), line_no);

        ScanPoint p;
        p.l = Vec3(v[0], v[1], v[2]);
        p.ins_rotation = rotation_from_angles(EulerAngles::from_degrees(v[3], v[4], v[5]));
        p.s = Vec3(v[6], v[7], v[8]);
        if (!orthonormal(p.ins_rotation)) throw ParseError("INS attitude is not a rotation", line_no);
        cloud.points.push_back(p);
    }
    if (!header_seen) throw ParseError("missing header line");
    return cloud;
}

Cloud load_fused(const std::filesystem::path& path, std::string label) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    if (label.empty()) label = path.stem().string();
    try {
        return read_fused(in, std::move(label));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_fused(const Cloud& cloud, std::ostream& out) {
    out << "# " << (cloud.label.empty() ? "cloud" : cloud.label) << ", " << cloud.size() << " points\n";
    out << kFusedHeader << '\n';
    out << std::setprecision(17);
    for (const auto& p : cloud.points) {
        const auto att = angles_from_rotation(p.ins_rotation).degrees();
        out << p.l.x() << ',' << p.l.y() << ',' << p.l.z() << ',' << att[0] << ',' << att[1] << ','
            << att[2] << ',' << p.s.x() << ',' << p.s.y() << ',' << p.s.z() << '\n';
    }
}

void save_fused(const Cloud& cloud, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    write_fused(cloud, out);
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<Vec3> georeference(const Cloud& cloud, const EulerAngles& boresight) {
    const RotationMatrix rb = rotation_from_angles(boresight);
    std::vector<Vec3> out;
    out.reserve(cloud.size());
    for (const auto& p : cloud.points) out.push_back(georeference_point(p, rb));
    return out;
}

std::vector<std::size_t> crop_indices(const Cloud& cloud, const CropBox& box,
                                      const EulerAngles& boresight_guess) {
    if (!(box.min.array() <= box.max.array()).all())
        throw InvalidArgument("crop box: min must not exceed max");
    const RotationMatrix rb = rotation_from_angles(boresight_guess);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < cloud.size(); ++i)
        if (box.contains(georeference_point(cloud[i], rb))) keep.push_back(i);
    return keep;
}

Cloud crop(const Cloud& cloud, const CropBox& box, const EulerAngles& boresight_guess) {
    const auto keep = crop_indices(cloud, box, boresight_guess);
    if (keep.empty()) throw EmptySelection("crop selected no points from '" + cloud.label + "'");
    Cloud out;
    out.label = cloud.label;
    out.points.reserve(keep.size());
    for (auto i : keep) out.points.push_back(cloud[i]);
    return out;
}

Cloud decimate(const Cloud& cloud, std::size_t target, std::uint64_t seed) {
    if (target == 0) throw EmptySelection("decimate to zero points");
    if (cloud.size() <= target) return cloud;
    std::vector<std::size_t> idx(cloud.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    // partial Fisher-Yates, then restore input order
    for (std::size_t k = 0; k < target; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, idx.size() - 1);
        std::swap(idx[k], idx[pick(rng)]);
    }
    idx.resize(target);
    std::sort(idx.begin(), idx.end());
    Cloud out;
    out.label = cloud.label;
    for (auto i : idx) out.points.push_back(cloud[i]);
    return out;
}

}  // namespace boresight
