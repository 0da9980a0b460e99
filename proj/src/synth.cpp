#include "rotavg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace rotavg {

double Rng::normal() {
  // 1 - uniform() lies in (0, 1], so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::Vector3d Rng::unit_vector() {
  for (;;) {
    Eigen::Vector3d v(normal(), normal(), normal());
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

void SynthSpec::validate() const {
  if (n < 3) throw InputError("synthetic instances need n >= 3");
  if (!(sigma >= 0.0)) throw InputError("sigma must be nonnegative");
  if (topology == Topology::RandomRegular) {
    if (degree < 2 || degree >= n) {
      throw InputError("random regular degree must be in [2, n)");
    }
    if ((static_cast<long long>(degree) * n) % 2 != 0) {
      throw InputError("random regular graph needs degree * n even");
    }
  }
}

Topology parse_topology(const std::string& name) {
  if (name == "cycle") return Topology::Cycle;
  if (name == "complete") return Topology::Complete;
  if (name == "random_regular" || name == "regular") return Topology::RandomRegular;
  throw InputError("unknown topology '" + name + "'");
}

std::string to_string(Topology t) {
  switch (t) {
    case Topology::Cycle:
      return "cycle";
    case Topology::Complete:
      return "complete";
    case Topology::RandomRegular:
      return "random_regular";
  }
  return "unknown";
}

namespace {

using EdgeList = std::vector<std::pair<int, int>>;

// Pairing model with rejection until the result is simple and connected.
EdgeList random_regular_edges(int n, int d, Rng& rng) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(n) * d);
    for (int v = 0; v < n; ++v) {
      for (int k = 0; k < d; ++k) stubs.push_back(v);
    }
    // Fisher-Yates with our own RNG so the shuffle is portable.
    for (std::size_t k = stubs.size(); k > 1; --k) {
      const std::size_t pick = static_cast<std::size_t>(rng.uniform() * k);
      std::swap(stubs[k - 1], stubs[std::min(pick, k - 1)]);
    }
    std::set<std::pair<int, int>> seen;
    bool ok = true;
    for (std::size_t k = 0; k < stubs.size(); k += 2) {
      int a = stubs[k];
      int b = stubs[k + 1];
      if (a == b) {
        ok = false;
        break;
      }
      if (a > b) std::swap(a, b);
      if (!seen.insert({a, b}).second) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    EdgeList edges(seen.begin(), seen.end());
    std::vector<Edge> probe;
    for (auto [a, b] : edges) probe.push_back({a, b, Rotation()});
    if (CameraGraph(n, probe).is_connected()) return edges;
  }
  throw InputError("failed to sample a connected simple random regular graph");
}

EdgeList topology_edges(const SynthSpec& spec, Rng& rng) {
  EdgeList edges;
  switch (spec.topology) {
    case Topology::Cycle:
      for (int i = 0; i + 1 < spec.n; ++i) edges.emplace_back(i, i + 1);
      edges.emplace_back(0, spec.n - 1);
      break;
    case Topology::Complete:
      for (int i = 0; i < spec.n; ++i) {
        for (int j = i + 1; j < spec.n; ++j) edges.emplace_back(i, j);
      }
      break;
    case Topology::RandomRegular:
      edges = random_regular_edges(spec.n, spec.degree, rng);
      break;
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

}  // namespace

SynthInstance generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const Eigen::Vector3d z = Eigen::Vector3d::UnitZ();

  std::vector<Rotation> truth;
  truth.reserve(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    truth.push_back(from_axis_angle<double>(z, 2.0 * std::numbers::pi * i / spec.n));
  }

  const EdgeList topo = topology_edges(spec, rng);
  std::vector<Edge> edges;
  edges.reserve(topo.size());
  for (auto [i, j] : topo) {
    const Eigen::Vector3d axis = rng.unit_vector();
    const double angle = spec.sigma * rng.normal();
    const Rotation noise = from_axis_angle<double>(axis, angle);
    edges.push_back({i, j, truth[i].transpose() * truth[j] * noise});
  }
  return {CameraGraph(spec.n, std::move(edges)), SolutionStack(std::move(truth))};
}

SolutionStack perturb_solution(const SolutionStack& r, double scale,
                               std::uint64_t seed) {
  if (!(scale >= 0.0)) throw InputError("perturbation scale must be nonnegative");
  if (scale == 0.0) return r;
  Rng rng(seed);
  std::vector<Rotation> out;
  out.reserve(r.size());
  for (const Rotation& ri : r.rotations()) {
    const Eigen::Vector3d axis = rng.unit_vector();
    const double angle = rng.uniform(0.0, scale);
    out.push_back(from_axis_angle<double>(axis, angle) * ri);
  }
  return SolutionStack(std::move(out));
}

}  // namespace rotavg
