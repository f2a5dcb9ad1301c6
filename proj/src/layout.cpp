#include "msvis/layout.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "msvis/error.hpp"

namespace msvis {

namespace {

constexpr double kRepulsion = 0.5;
constexpr double kSpring = 0.8;
constexpr double kGravity = 0.05;
constexpr double kStartTemperature = 0.5;
constexpr double kEndTemperature = 0.005;
constexpr double kMinDistance = 1e-3;

struct Vec {
  double x = 0, y = 0, z = 0;

  Vec operator+(const Vec& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec operator-(const Vec& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec& operator+=(const Vec& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec& operator-=(const Vec& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  double Norm() const { return std::sqrt(x * x + y * y + z * z); }
};

// Uniform in [-1, 1) from the top 53 bits; portable unlike
// std::uniform_real_distribution.
double Uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

Vec PointOnSphere(std::mt19937_64& rng, double radius) {
  while (true) {
    Vec v{Uniform(rng), Uniform(rng), Uniform(rng)};
    const double n = v.Norm();
    if (n > 1e-6 && n <= 1.0) return v * (radius / n);
  }
}

void Normalize(std::vector<Vec>& pos) {
  Vec lo = pos.front(), hi = pos.front();
  for (const auto& p : pos) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  const Vec center = (lo + hi) * 0.5;
  const double half = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z}) * 0.5;
  for (auto& p : pos) {
    p -= center;
    if (half > 0) p = p * (1.0 / half);
  }
}

double Clamp1(double v) { return std::clamp(v, -1.0, 1.0); }

// Pushes apart pairs closer than kMinSeparation, staying inside the unit box.
void EnforceSeparation(std::vector<Vec>& pos) {
  const double target = kMinSeparation * 1.5;
  for (int round = 0; round < 200; ++round) {
    bool moved = false;
    for (std::size_t i = 0; i < pos.size(); ++i) {
      for (std::size_t j = i + 1; j < pos.size(); ++j) {
        Vec d = pos[j] - pos[i];
        double dist = d.Norm();
        if (dist >= kMinSeparation) continue;
        if (dist < 1e-12) {
          // Coincident: pick a fixed direction from the pair indices.
          d = {1.0, static_cast<double>(i % 7) + 1.0, static_cast<double>(j % 5) + 1.0};
          dist = d.Norm();
        }
        const Vec unit = d * (1.0 / dist);
        const double gap = dist < 1e-12 ? target : target - dist;
        const Vec shift = unit * (gap * 0.5);
        pos[i] -= shift;
        pos[j] += shift;
        for (std::size_t k : {i, j}) {
          pos[k] = {Clamp1(pos[k].x), Clamp1(pos[k].y), Clamp1(pos[k].z)};
        }
        moved = true;
      }
    }
    if (!moved) break;
  }
}

}  // namespace

LayoutResult Layout3d(const View& view, std::uint64_t seed, int iterations) {
  if (view.nodes.empty()) {
    throw Error(ErrorCode::kEmptyView, {}, "cannot lay out an empty view");
  }
  iterations = std::max(iterations, 0);
  const std::size_t n = view.nodes.size();

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[view.nodes[i].node.id] = i;

  struct Spring {
    std::size_t a, b;
    double rest;
  };
  std::vector<Spring> springs;
  for (const auto& e : view.edges) {
    auto ia = index.find(e.a);
    auto ib = index.find(e.b);
    if (ia == index.end() || ib == index.end()) continue;
    springs.push_back({ia->second, ib->second,
                       1.0 / static_cast<double>(std::max<std::uint64_t>(e.dependency_count, 1))});
  }

  std::mt19937_64 rng(seed);
  const double radius = std::max(1.0, 0.5 * std::sqrt(static_cast<double>(n)));
  std::vector<Vec> pos(n);
  for (auto& p : pos) p = PointOnSphere(rng, radius);

  std::vector<Vec> force(n);
  for (int it = 0; it < iterations; ++it) {
    std::fill(force.begin(), force.end(), Vec{});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const Vec d = pos[i] - pos[j];
        const double dist = std::max(d.Norm(), kMinDistance);
        const Vec f = d * (kRepulsion / (dist * dist * dist));
        force[i] += f;
        force[j] -= f;
      }
    }
    for (const auto& s : springs) {
      const Vec d = pos[s.b] - pos[s.a];
      const double dist = std::max(d.Norm(), kMinDistance);
      const Vec f = d * (kSpring * (dist - s.rest) / dist);
      force[s.a] += f;
      force[s.b] -= f;
    }
    const double frac = iterations > 1 ? static_cast<double>(it) / (iterations - 1) : 1.0;
    const double temperature = kStartTemperature + (kEndTemperature - kStartTemperature) * frac;
    for (std::size_t i = 0; i < n; ++i) {
      Vec f = force[i] - pos[i] * kGravity;
      const double mag = f.Norm();
      if (mag > temperature) f = f * (temperature / mag);
      pos[i] += f;
    }
  }

  Normalize(pos);
  EnforceSeparation(pos);

  LayoutResult result;
  result.seed = seed;
  result.iterations = iterations;
  for (std::size_t i = 0; i < n; ++i) {
    result.positions[view.nodes[i].node.id] = {pos[i].x, pos[i].y, pos[i].z};
  }
  return result;
}

}  // namespace msvis
