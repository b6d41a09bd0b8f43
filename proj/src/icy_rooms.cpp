#include "coda/envs/icy_rooms.hpp"

#include <algorithm>

namespace coda {

FactorSpec icy_rooms_spec() {
  return FactorSpec({{"x", 1}, {"y", 1}}, {{"dx", 1}, {"dy", 1}},
                    {{0.0, 1.0}, {0.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}});
}

int icy_rooms_room(const Vec& s) { return s[0] >= 0.5 ? 1 : 0; }

Vec icy_rooms_step(const Vec& s, const Vec& a, const IcyRoomsConfig& cfg) {
  const double scale = icy_rooms_room(s) == 1 ? cfg.scale_icy : cfg.scale_normal;
  auto clip01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
  return {clip01(s[0] + scale * a[0]), clip01(s[1] + scale * a[1])};
}

LocalMask icy_rooms_mask(const Vec& /*s*/, const Vec& /*a*/) {
  static const LocalMask block = LocalMask::from_rows({{1, 0}, {0, 1}, {1, 0}, {0, 1}});
  return block;
}

LocalModel icy_rooms_naive_model() {
  return LocalModel([](const Vec& s, const Vec& a) { return icy_rooms_mask(s, a); });
}

LocalModel icy_rooms_full_model() {
  return LocalModel([](const Vec& s, const Vec& a) { return icy_rooms_mask(s, a); },
                    [](const Vec& s, const Vec&) {
                      return icy_rooms_room(s) == 1 ? std::string("icy")
                                                    : std::string("normal");
                    });
}

}  // namespace coda
