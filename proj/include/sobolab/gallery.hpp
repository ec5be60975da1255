#pragma once

#include <vector>

#include "sobolab/geometry.hpp"

namespace sobolab::geometry {

/// Overlap used where gallery pieces meet face to face.
inline constexpr double kGalleryOverlap = 1e-6;

/// Rooms {|x'| < (x_n - z_k + eps_k)^beta, z_k < x_n < z_k + h_k} stacked along
/// the last axis; corridor H_k (radius eps_k^beta, length corridor_factor*h_k)
/// joins the vertex of room k to the top of room k-1. H_1 is a dead end.
struct CuspChainParams {
  int n = 3;
  double beta = 2.0;
  std::vector<double> h;
  std::vector<double> eps;
  int resolution = 64;
  double corridor_factor = 0.25;
};

struct CuspRoom {
  double z;              // x_n at the vertex
  double h, eps, beta;
  double corridor_lo;    // bottom of H_k
  double corridor_radius;
  double radius(double t) const;  // exact cusp radius at height t above the vertex
};

struct CuspChainLayout {
  CuspChainParams params;
  std::vector<CuspRoom> rooms;
};

CuspChainLayout cusp_chain_layout(const CuspChainParams& p);
Domain cusp_chain(const CuspChainParams& p);

/// Base slab {x_n in (-1,0)} with rooms R_k (width a_k, height b_k) standing on
/// necks N_k (width d_k, length c_k) side by side along x_1.
struct RoomsParams {
  int n = 2;
  std::vector<double> a, b, c, d;  // d empty: d_k = c_k^3
};

struct RoomsLayout {
  RoomsParams params;
  double base_x = 1.0, base_y = 1.0;  // half extents of the base
  std::vector<double> x_left;         // left edge of each room
  std::vector<double> neck_center;    // x_1 of each neck axis
};

RoomsLayout rooms_layout(const RoomsParams& p);
Domain rooms_corridors(const RoomsParams& p);

/// Balls B_{delta_k} along the last axis joined by cylinders of radius
/// corridor_scale * eps_{k+1}.
struct BallChainParams {
  int n = 3;
  std::vector<double> delta, eps;
  double corridor_scale = 1.0;
};

struct BallChainLayout {
  BallChainParams params;
  std::vector<Vec3> centers;
};

BallChainLayout ball_chain_layout(const BallChainParams& p);
Domain ball_chain(const BallChainParams& p);

/// Named gallery entry: ball, box, cusp_chain, rooms_corridors, ball_chain.
Domain gallery(const std::string& name, const json& params);

}  // namespace sobolab::geometry
