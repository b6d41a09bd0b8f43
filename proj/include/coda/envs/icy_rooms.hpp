#pragma once

#include "coda/core/types.hpp"
#include "coda/lcm/mask.hpp"

namespace coda {

/// Two-room counterexample: both rooms have the same block-diagonal local
/// mask (x and y move independently of each other), but the displacement
/// scale differs per room, so the structural equations are not shared
/// across rooms. Room 0 is x < 0.5; room 1 (icy) is x >= 0.5.
struct IcyRoomsConfig {
  double scale_normal = 0.05;
  double scale_icy = 0.15;
};

FactorSpec icy_rooms_spec();

int icy_rooms_room(const Vec& s);

Vec icy_rooms_step(const Vec& s, const Vec& a, const IcyRoomsConfig& cfg = {});

/// Identical block-diagonal mask in both rooms.
LocalMask icy_rooms_mask(const Vec& s, const Vec& a);

/// Mask-only model: treats the whole square as one neighborhood (the mask
/// pattern is the same everywhere), which is exactly the naive check.
LocalModel icy_rooms_naive_model();

/// Region-aware model: neighborhoods are the rooms, the spaces over which
/// the structural equations are actually constant.
LocalModel icy_rooms_full_model();

}  // namespace coda
