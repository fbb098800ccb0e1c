#include "tbsa/stability.hpp"

// Header-only templates; explicit instantiations keep the double versions in
// the library.
namespace tbsa {

template Vec2 net_glue_force<double>(int, double);
template bool is_detached<double>(const Vec2&, const Vec2&, DetachmentMode, QuadrantConvention);
template double critical_seed_size<double>(double, double, double);
Vec2 measured_net_force(std::span<const Wrench> wrenches, std::span<const int> component) {
  Vec2 sum = Vec2::Zero();
  for (int id : component) sum += wrenches[static_cast<std::size_t>(id)].force;
  return sum;
}

template double harmonic_crossover_size<double>(double, double, double);

}  // namespace tbsa
