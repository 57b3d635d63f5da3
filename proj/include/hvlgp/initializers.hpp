#pragma once

#include "hvlgp/rng.hpp"
#include "hvlgp/tree.hpp"

#include <cstdint>
#include <string_view>

namespace hvlgp {

/// 2n leaves, each drawn i.i.d. uniformly from the 2n terminals. The shape
/// grows by uniform attachment: starting from a root join with two open
/// slots, 2n - 2 times a uniformly chosen open slot receives a new join;
/// the 2n remaining slots are then filled in slot order.
GpTree init_unity_expectation(std::uint32_t n, Rng& rng);

/// Same growth procedure for an arbitrary leaf count.
GpTree random_tree(std::size_t leaves, std::uint32_t n, Rng& rng);

/// 2n copies of ~x1 on a left-leaning vine, so D_1 = 2n.
GpTree init_adversarial_majority(std::uint32_t n);

/// Local optimum for strict single-step MAJORITY search: x1..x_{n-1} once
/// each, then n + 1 copies of ~x_n, on a left-leaning vine. Requires n >= 2.
GpTree init_t_lopt(std::uint32_t n);

GpTree init_from_text(std::string_view text, std::uint32_t n);

/// Left-leaning vine "(J (J (J a b) c) d)" over the given leaves.
GpTree make_vine(std::span<const Terminal> leaves);

/// Dispatches on an initializer id: "unity", "adversarial-neg1", "t-lopt",
/// or "text:<serialized tree>".
GpTree make_initial(std::string_view id, std::uint32_t n, Rng& rng);

/// Throws std::invalid_argument for an unknown id.
void check_initializer_id(std::string_view id);

} // namespace hvlgp
