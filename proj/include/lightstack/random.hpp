// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Seed derivation. Every randomized step draws from its own generator seeded
// by (base seed, path of labels/indices), so results never depend on the
// order in which independent work items run.

#ifndef LIGHTSTACK_RANDOM_HPP_
#define LIGHTSTACK_RANDOM_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace lightstack {

using Rng = std::mt19937_64;

// FNV-1a, for turning stream labels into path components.
std::uint64_t hash_label(std::string_view label);

// Mixes base and path through std::seed_seq, whose output is fully specified
// by the standard.
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> path);

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace lightstack

#endif  // LIGHTSTACK_RANDOM_HPP_
