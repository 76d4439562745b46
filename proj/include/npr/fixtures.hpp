#pragma once

#include "npr/mesh.hpp"

namespace npr::fixtures {

// Axis-aligned cube [-h, h]^3 as 12 outward-facing triangles.
Mesh cube(double half = 1.0);

// Regular-ish tetrahedron with one face toward +z.
Mesh tetrahedron();

// Two triangles spanning [-h, h]^2 in the plane z = z0, facing +z.
Mesh quad(double half = 1.0, double z0 = 0.0);

// Quad in the plane z = z0 covering [x0, x1] x [y0, y1], facing +z.
Mesh rect(double x0, double x1, double y0, double y1, double z0);

Mesh icosphere(int subdivisions, double radius = 1.0);

// Flat n x n grid in the xy plane, facing +z.
Mesh grid(int n, double half = 1.0);

// Ground plane y = y0 facing +y, n x n cells.
Mesh ground(double half, double y0 = 0.0, int n = 1);

// Closed box between two corners.
Mesh box(const Vec3& lo, const Vec3& hi);

// Torus around the y axis; ring_segments * tube_segments * 2 triangles.
// bump adds a deterministic ripple to the tube radius.
Mesh torus(int ring_segments, int tube_segments, double ring_radius = 1.0, double tube_radius = 0.35,
           double bump = 0.0);

// Vertical square pole standing on a ground plane; the pole has no bottom cap.
struct PoleOnPlane {
  Mesh mesh;
  Vec3 base;  // center of the pole's footprint on the plane
  double height = 1.0;
  double half_width = 0.05;
  double plane_y = 0.0;
  double plane_half = 4.0;
};

PoleOnPlane pole_on_plane(double height = 1.0, double half_width = 0.05, double plane_half = 3.0);

}  // namespace npr::fixtures
