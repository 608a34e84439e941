#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Geometry>

#include "boresight/cloud.hpp"
#include "boresight/errors.hpp"

namespace boresight {

namespace {

constexpr int kPatches = 5;
constexpr double kMinPatchAngleDeg = 30.0;
constexpr double kMinObjectHeight = 0.45;
constexpr double kGroundClearance = 1.0;
constexpr double kSpeed = 8.0;  // m/s

struct Patch {
    Vec3 center;
    Vec3 e1, e2;  // in-plane half-axes
    double area() const { return 4.0 * e1.norm() * e2.norm(); }
};

std::vector<Patch> make_object(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vec3> normals;
    while (static_cast<int>(normals.size()) < kPatches) {
        const double az = 2.0 * std::numbers::pi * unit(rng);
        const double el = deg_to_rad(25.0 + 65.0 * unit(rng));
        const Vec3 n(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
        const bool distinct = std::all_of(normals.begin(), normals.end(), [&](const Vec3& m) {
            return std::acos(std::clamp(n.dot(m), -1.0, 1.0)) >= deg_to_rad(kMinPatchAngleDeg);
        });
        if (distinct) normals.push_back(n);
    }

    std::vector<Patch> patches;
    for (const auto& n : normals) {
        Patch p;
        p.center = Vec3(-1.8 + 3.6 * unit(rng), -0.7 + 1.4 * unit(rng), 1.0 + 0.5 * unit(rng));
        const Vec3 seed_dir = std::abs(n.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
        const Vec3 a = n.cross(seed_dir).normalized();
        const Vec3 b = n.cross(a).normalized();
        const double spin = 2.0 * std::numbers::pi * unit(rng);
        p.e1 = (std::cos(spin) * a + std::sin(spin) * b) * (0.55 + 0.2 * unit(rng));
        p.e2 = (-std::sin(spin) * a + std::cos(spin) * b) * (0.45 + 0.2 * unit(rng));
        patches.push_back(p);
    }
    return patches;
}

std::vector<Vec3> sample_object(const std::vector<Patch>& patches, std::size_t n, std::mt19937_64& rng) {
    std::vector<double> areas;
    for (const auto& p : patches) areas.push_back(p.area());
    std::discrete_distribution<int> which(areas.begin(), areas.end());
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    std::vector<Vec3> out;
    out.reserve(n);
    while (out.size() < n) {
        const Patch& p = patches[which(rng)];
        const Vec3 x = p.center + sym(rng) * p.e1 + sym(rng) * p.e2;
        if (x.z() >= kMinObjectHeight) out.push_back(x);
    }
    return out;
}

CropBox bounding_box(const std::vector<Vec3>& pts, double margin) {
    CropBox box{pts.front(), pts.front()};
    for (const auto& p : pts) {
        box.min = box.min.cwiseMin(p);
        box.max = box.max.cwiseMax(p);
    }
    box.min.array() -= margin;
    box.max.array() += margin;
    return box;
}

std::vector<Vec3> sample_ground(std::size_t n, const CropBox& object, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> gx(-15.0, 15.0);
    std::uniform_real_distribution<double> gy(-10.0, 10.0);
    std::vector<Vec3> out;
    while (out.size() < n) {
        const Vec3 g(gx(rng), gy(rng), 0.0);
        const bool under = g.x() > object.min.x() - kGroundClearance && g.x() < object.max.x() + kGroundClearance &&
                           g.y() > object.min.y() - kGroundClearance && g.y() < object.max.y() + kGroundClearance;
        if (!under) out.push_back(g);
    }
    return out;
}

struct FlightLine {
    Eigen::Vector2d along;   // unit track direction in the mapping xy plane
    Eigen::Vector2d origin;  // track point closest to the object centre
    double yaw_deg;          // mean INS heading
    double altitude;
    double phase;
};

// Scanner pose when the push-broom sweep crosses the along-track position of `p`.
ScanPoint observe(const Vec3& p, const FlightLine& line, const RotationMatrix& boresight,
                  double noise_sigma, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> lead(-0.4, 0.4);
    std::normal_distribution<double> noise(0.0, 1.0);

    const Eigen::Vector2d across(-line.along.y(), line.along.x());
    const double u = (p.head<2>() - line.origin).dot(line.along) + lead(rng);
    const double t = u / kSpeed;
    const double roll = 1.5 * std::sin(0.7 * t + line.phase);
    const double pitch = 1.0 * std::sin(0.5 * t + 0.5 * line.phase) + 2.0;
    const double yaw = line.yaw_deg + 0.8 * std::sin(0.3 * t + line.phase);

    ScanPoint sp;
    const Eigen::Vector2d xy = line.origin + u * line.along + 0.3 * std::sin(0.9 * t) * across;
    sp.s = Vec3(xy.x(), xy.y(), line.altitude + 0.5 * std::sin(0.4 * t));
    sp.ins_rotation = rotation_from_angles(EulerAngles::from_degrees(roll, pitch, yaw));
    sp.l = boresight.transpose() * (sp.ins_rotation.transpose() * (p - sp.s));
    if (noise_sigma > 0.0) sp.l += noise_sigma * Vec3(noise(rng), noise(rng), noise(rng));
    return sp;
}

std::string join(const std::vector<std::size_t>& v) {
    std::ostringstream os;
    for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k];
    return os.str();
}

std::vector<std::size_t> split_indices(const std::string& s) {
    std::vector<std::size_t> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ','))
        if (!tok.empty()) out.push_back(std::stoull(tok));
    return out;
}

}  // namespace

SynthScene synth_generate(const SynthConfig& cfg) {
    if (cfg.n_hat == 0) throw InvalidArgument("synth: n_hat must be positive");
    if (cfg.n_hat > cfg.n_bar) throw InvalidArgument("synth: n_hat must not exceed n_bar");
    if (!(cfg.noise_sigma >= 0.0)) throw InvalidArgument("synth: noise_sigma must be >= 0");
    if (!cfg.boresight.finite()) throw InvalidArgument("synth: non-finite boresight");

    std::mt19937_64 rng(cfg.seed);
    const auto patches = make_object(rng);

    std::vector<Vec3> bar_obj = sample_object(patches, cfg.n_bar, rng);
    std::vector<Vec3> hat_obj;
    if (cfg.shared_surface) {
        std::vector<std::size_t> idx(bar_obj.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t k = 0; k < cfg.n_hat; ++k) hat_obj.push_back(bar_obj[idx[k]]);
    } else {
        hat_obj = sample_object(patches, cfg.n_hat, rng);
    }

    std::vector<Vec3> all_obj = bar_obj;
    all_obj.insert(all_obj.end(), hat_obj.begin(), hat_obj.end());
    const CropBox object_box = bounding_box(all_obj, 0.2);

    const auto hat_ground = sample_ground(cfg.ground_hat, object_box, rng);
    const auto bar_ground = sample_ground(cfg.ground_bar, object_box, rng);

    SynthScene scene;
    scene.truth.boresight = cfg.boresight;
    scene.truth.noise_sigma = cfg.noise_sigma;
    scene.truth.seed = cfg.seed;
    scene.truth.shared_surface = cfg.shared_surface;
    scene.truth.layout = cfg.layout;
    scene.truth.object_box = object_box;

    const RotationMatrix rb = rotation_from_angles(cfg.boresight);
    // The heading offsets of one degree stand in for a small crab angle.
    const double a = cfg.line_offset;
    const FlightLine hat_line{{1.0, 0.0}, {0.0, -a}, 0.0, cfg.altitude, 0.3};
    const FlightLine bar_line = cfg.layout == LineLayout::Opposite
                                    ? FlightLine{{-1.0, 0.0}, {0.0, a}, 179.0, cfg.altitude, 1.9}
                                    : FlightLine{{0.0, 1.0}, {-a, 0.0}, 89.0, cfg.altitude, 1.9};

    // Object and ground returns are interleaved as a real sweep would be; the
    // object membership is recorded in the ground truth.
    const auto build = [&](const std::vector<Vec3>& obj, const std::vector<Vec3>& ground, const FlightLine& line,
                           Cloud& cloud, std::vector<Vec3>& world, std::vector<std::size_t>& members) {
        std::vector<std::pair<Vec3, bool>> all;
        for (const auto& p : obj) all.emplace_back(p, true);
        for (const auto& p : ground) all.emplace_back(p, false);
        std::stable_sort(all.begin(), all.end(), [&](const auto& a, const auto& b) {
            return a.first.template head<2>().dot(line.along) < b.first.template head<2>().dot(line.along);
        });
        for (const auto& [p, is_obj] : all) {
            if (is_obj) members.push_back(cloud.points.size());
            cloud.points.push_back(observe(p, line, rb, cfg.noise_sigma, rng));
            world.push_back(p);
        }
    };
    scene.hat.label = "hat";
    scene.bar.label = "bar";
    build(hat_obj, hat_ground, hat_line, scene.hat, scene.hat_world, scene.truth.hat_object);
    build(bar_obj, bar_ground, bar_line, scene.bar, scene.bar_world, scene.truth.bar_object);
    return scene;
}

void save_ground_truth(const GroundTruth& t, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    const auto deg = t.boresight.degrees();
    out << std::setprecision(17);
    out << "alpha_deg=" << deg[0] << '\n'
        << "beta_deg=" << deg[1] << '\n'
        << "gamma_deg=" << deg[2] << '\n'
        << "noise_sigma=" << t.noise_sigma << '\n'
        << "seed=" << t.seed << '\n'
        << "shared_surface=" << (t.shared_surface ? 1 : 0) << '\n'
        << "layout=" << (t.layout == LineLayout::Crossing ? "crossing" : "opposite") << '\n'
        << "object_box=" << t.object_box.min.x() << ',' << t.object_box.min.y() << ',' << t.object_box.min.z()
        << ',' << t.object_box.max.x() << ',' << t.object_box.max.y() << ',' << t.object_box.max.z() << '\n'
        << "hat_object=" << join(t.hat_object) << '\n'
        << "bar_object=" << join(t.bar_object) << '\n';
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    GroundTruth t;
    double deg[3] = {0, 0, 0};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value", line_no);
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        try {
            if (key == "alpha_deg") deg[0] = std::stod(value);
            else if (key == "beta_deg") deg[1] = std::stod(value);
            else if (key == "gamma_deg") deg[2] = std::stod(value);
            else if (key == "noise_sigma") t.noise_sigma = std::stod(value);
            else if (key == "seed") t.seed = std::stoull(value);
            else if (key == "shared_surface") t.shared_surface = value == "1";
            else if (key == "layout") {
                if (value != "opposite" && value != "crossing") throw ParseError("unknown layout '" + value + "'", line_no);
                t.layout = value == "crossing" ? LineLayout::Crossing : LineLayout::Opposite;
            }
            else if (key == "object_box") {
                std::istringstream is(value);
                double v[6];
                char comma;
                is >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3] >> comma >> v[4] >> comma >> v[5];
                if (!is) throw ParseError("object_box needs 6 values", line_no);
                t.object_box = CropBox{Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5])};
            } else if (key == "hat_object") t.hat_object = split_indices(value);
            else if (key == "bar_object") t.bar_object = split_indices(value);
        } catch (const std::logic_error&) {
            throw ParseError("bad value for " + key, line_no);
        }
    }
    t.boresight = EulerAngles::from_degrees(deg[0], deg[1], deg[2]);
    return t;
}

}  // namespace boresight
