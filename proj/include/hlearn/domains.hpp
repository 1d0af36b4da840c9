#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hlearn/errors.hpp"

namespace hlearn {

enum class Family { SlidingTile, LightsOut, RubiksCube };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

/// Identifies one concrete state space: a puzzle family at a fixed size.
/// `size` is family-specific: number of tiles for SlidingTile (8 -> 3x3 grid),
/// grid side for LightsOut, cube side for RubiksCube.
struct StateSpaceSpec {
    Family family = Family::SlidingTile;
    int size = 8;
    double unit_cost = 1.0;

    bool operator==(const StateSpaceSpec& o) const {
        return family == o.family && size == o.size;
    }
};

/// Canonical state payload. Byte semantics per family:
///  - SlidingTile: permutation of 0..N over the grid, 0 is the blank;
///  - LightsOut: N*N bytes of 0/1, row-major;
///  - RubiksCube: 6*N*N sticker colors 0..5, faces U,D,L,R,F,B row-major.
struct PuzzleState {
    std::vector<std::uint8_t> payload;
    bool operator==(const PuzzleState&) const = default;
};

struct PuzzleStateHash {
    std::size_t operator()(const PuzzleState& s) const noexcept {
        // FNV-1a over the payload bytes.
        std::size_t h = 1469598103934665603ull;
        for (std::uint8_t b : s.payload) {
            h ^= b;
            h *= 1099511628211ull;
        }
        return h;
    }
};

struct Successor {
    PuzzleState state;
    double cost;
    int op;
};

void validate_spec(const StateSpaceSpec& spec);
void validate_state(const StateSpaceSpec& spec, const PuzzleState& s);

int num_operators(const StateSpaceSpec& spec);
std::string operator_name(const StateSpaceSpec& spec, int op);
int inverse_operator(const StateSpaceSpec& spec, int op);

PuzzleState goal_state(const StateSpaceSpec& spec);
bool is_goal(const StateSpaceSpec& spec, const PuzzleState& s);

/// Applies one operator. Returns false (state untouched) when the operator is
/// not legal in `s` (SlidingTile blank at an edge); always true otherwise.
bool apply_operator(const StateSpaceSpec& spec, PuzzleState& s, int op);

/// All states reachable by one legal operator, with edge costs. Never contains
/// duplicates or `s` itself. Throws MalformedStateError on a bad payload.
std::vector<Successor> successors(const StateSpaceSpec& spec, const PuzzleState& s);

/// Applies `depth` uniformly random legal operators starting from the goal.
PuzzleState scramble(const StateSpaceSpec& spec, int depth, std::mt19937_64& rng);

std::size_t encode_dim(const StateSpaceSpec& spec);

/// Fixed-length numeric encoding, injective over valid states. One-hot for
/// SlidingTile and RubiksCube, raw 0/1 grid for LightsOut.
std::vector<double> encode(const StateSpaceSpec& spec, const PuzzleState& s);
void encode_into(const StateSpaceSpec& spec, const PuzzleState& s, double* out);

/// SlidingTile only: true iff `s` is in the goal's connected component.
bool sliding_tile_solvable(const StateSpaceSpec& spec, const PuzzleState& s);

}  // namespace hlearn
