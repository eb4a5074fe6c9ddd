// Copyright 2026 The curbvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "curbvote/tensor_voting.hpp"

#include <cmath>
#include <memory>

#include "curbvote/errors.hpp"
#include "curbvote/parallel.hpp"

namespace curbvote {

VotingParams VotingParams::with_sigma(double sigma) {
  VotingParams p;
  p.sigma = sigma;
  p.cutoff_radius = default_cutoff(sigma);
  return p;
}

void VotingParams::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ArgumentError("sigma must be positive");
  if (!(cutoff_radius > 0.0) || !std::isfinite(cutoff_radius)) {
    throw ArgumentError("cutoff radius must be positive");
  }
}

double decay(double d, double sigma) {
  if (!(sigma > 0.0)) throw ArgumentError("decay needs sigma > 0");
  if (!(d >= 0.0)) throw ArgumentError("decay needs a non-negative distance");
  return std::exp(-(d * d) / (sigma * sigma));
}

std::vector<SymTensor3> encode(const PointCloud& cloud) {
  if (cloud.empty()) throw EmptyInputError("cannot encode an empty cloud");
  return std::vector<SymTensor3>(cloud.size(), SymTensor3::identity());
}

SymTensor3 ball_vote(const Point3& receiver, const Point3& voter, double sigma) {
  const Vec3 r = receiver - voter;
  const double d = norm(r);
  if (d == 0.0) throw ZeroDistanceError("ball vote between coincident points");
  const Vec3 dir = r * (1.0 / d);
  SymTensor3 t = SymTensor3::identity() - SymTensor3::outer(dir);
  return t * decay(d, sigma);
}

std::vector<SymTensor3> sparse_vote(const PointCloud& cloud, const NeighborSearch& search,
                                    const VotingParams& params, unsigned threads) {
  params.validate();
  if (search.size() != cloud.size()) {
    throw ArgumentError("neighbor search was built over a different cloud");
  }
  const SymTensor3 self = params.include_self ? SymTensor3::identity() : SymTensor3::zero();
  std::vector<SymTensor3> out(cloud.size());
  parallel_for(cloud.size(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<Neighbor> neighbors;
    for (std::size_t i = begin; i < end; ++i) {
      const Point3& receiver = cloud[i];
      search.radius_neighbors(receiver, params.cutoff_radius, neighbors);
      SymTensor3 acc = self;
      for (const Neighbor& n : neighbors) {
        if (n.index == i || n.distance == 0.0) continue;
        acc += ball_vote(receiver, cloud[n.index], params.sigma);
      }
      out[i] = acc;
    }
  });
  return out;
}

SaliencyRecord saliency(const EigenDecomposition3& d) {
  SaliencyRecord s;
  s.stick = d.values[0] - d.values[1];
  s.plate = d.values[1] - d.values[2];
  s.ball = d.values[2];
  s.normal = d.vectors[0];
  s.tangent = d.vectors[2];
  s.eigenvalues = d.values;
  return s;
}

std::vector<SaliencyRecord> decompose_all(const std::vector<SymTensor3>& tensors,
                                          unsigned threads) {
  std::vector<SaliencyRecord> out(tensors.size());
  parallel_for(tensors.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = saliency(decompose(tensors[i]));
  });
  return out;
}

void attach_saliency(PointCloud& cloud, const std::vector<SaliencyRecord>& records) {
  if (records.size() != cloud.size()) throw ArgumentError("one saliency record per point expected");
  const std::size_t n = records.size();
  std::vector<double> stick(n), plate(n), ball(n), nx(n), ny(n), nz(n), zsal(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = records[i];
    stick[i] = r.stick;
    plate[i] = r.plate;
    ball[i] = r.ball;
    nx[i] = r.normal.x;
    ny[i] = r.normal.y;
    nz[i] = r.normal.z;
    zsal[i] = std::abs(r.normal.z) * r.stick;
  }
  cloud.set_channel(std::string(channels::kStick), std::move(stick));
  cloud.set_channel(std::string(channels::kPlate), std::move(plate));
  cloud.set_channel(std::string(channels::kBall), std::move(ball));
  cloud.set_channel(std::string(channels::kNx), std::move(nx));
  cloud.set_channel(std::string(channels::kNy), std::move(ny));
  cloud.set_channel(std::string(channels::kNz), std::move(nz));
  cloud.set_channel(std::string(channels::kZsal), std::move(zsal));
}

PointCloud saliency_field(const PointCloud& cloud, const VotingParams& params, unsigned threads,
                          bool brute_force) {
  params.validate();
  if (cloud.empty()) throw EmptyInputError("saliency field of an empty cloud");
  std::unique_ptr<NeighborSearch> search;
  if (brute_force) {
    search = std::make_unique<BruteForceSearch>(cloud);
  } else {
    search = std::make_unique<UniformGridIndex>(cloud, params.cutoff_radius);
  }
  const auto tensors = sparse_vote(cloud, *search, params, threads);
  PointCloud out = cloud;
  attach_saliency(out, decompose_all(tensors, threads));
  return out;
}

}  // namespace curbvote
