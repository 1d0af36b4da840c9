#include "hlearn/domains.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>

namespace hlearn {
namespace {

int grid_side(const StateSpaceSpec& spec) {
    // SlidingTile size N means N tiles plus a blank on a square grid.
    int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(spec.size + 1))));
    return side;
}

const char* kCubeFaces = "UDLRFB";

// Sticker permutation tables for the 12 quarter turns of an NxN cube,
// generated from a scaled-integer surface model: the cube occupies
// [0,2N]^3, sticker centers sit at odd coordinates on a face plane, and a
// face turn is an exact 90-degree integer rotation of the outer slab about
// the face axis.
struct CubeMoves {
    int n = 0;
    // moves[op][i] = destination index of the sticker currently at index i.
    std::vector<std::vector<int>> moves;
};

struct P3 {
    int x, y, z;
};

P3 point_of_sticker(int n, int face, int r, int c) {
    int two_n = 2 * n;
    int a = 2 * r + 1, b = 2 * c + 1;
    switch (face) {
        case 0: return {b, two_n, a};  // U: y = 2N, col->x, row->z
        case 1: return {b, 0, a};      // D
        case 2: return {0, a, b};      // L: x = 0, row->y, col->z
        case 3: return {two_n, a, b};  // R
        case 4: return {b, a, two_n};  // F: z = 2N, col->x, row->y
        default: return {b, a, 0};     // B
    }
}

int sticker_of_point(int n, const P3& p) {
    int two_n = 2 * n;
    int face, a, b;
    if (p.y == two_n) {
        face = 0; a = p.z; b = p.x;
    } else if (p.y == 0) {
        face = 1; a = p.z; b = p.x;
    } else if (p.x == 0) {
        face = 2; a = p.y; b = p.z;
    } else if (p.x == two_n) {
        face = 3; a = p.y; b = p.z;
    } else if (p.z == two_n) {
        face = 4; a = p.y; b = p.x;
    } else {
        face = 5; a = p.y; b = p.x;
    }
    int r = (a - 1) / 2, c = (b - 1) / 2;
    return (face * n + r) * n + c;
}

// 90-degree rotation about the axis through the cube center (value N in
// scaled coordinates). `axis` 0/1/2 = x/y/z, `dir` +1 or -1.
P3 rotate_point(int n, const P3& p, int axis, int dir) {
    int cx = n;  // scaled center
    int u, v;
    P3 q = p;
    switch (axis) {
        case 0:  // rotate (y,z)
            u = p.y - cx; v = p.z - cx;
            q.y = cx + dir * v; q.z = cx - dir * u;
            break;
        case 1:  // rotate (z,x)
            u = p.z - cx; v = p.x - cx;
            q.z = cx + dir * v; q.x = cx - dir * u;
            break;
        default:  // rotate (x,y)
            u = p.x - cx; v = p.y - cx;
            q.x = cx + dir * v; q.y = cx - dir * u;
            break;
    }
    return q;
}

CubeMoves build_cube_moves(int n) {
    CubeMoves cm;
    cm.n = n;
    int total = 6 * n * n;
    int two_n = 2 * n;
    // face -> (axis, whether the face sits on the max plane)
    struct FaceAxis {
        int axis;
        bool max_side;
    };
    const std::array<FaceAxis, 6> fa = {{{1, true},   // U: y = 2N
                                         {1, false},  // D
                                         {0, false},  // L: x = 0
                                         {0, true},   // R
                                         {2, true},   // F: z = 2N
                                         {2, false}}};
    for (int face = 0; face < 6; ++face) {
        for (int dir : {+1, -1}) {
            std::vector<int> perm(total);
            for (int i = 0; i < total; ++i) perm[i] = i;
            for (int f2 = 0; f2 < 6; ++f2) {
                for (int r = 0; r < n; ++r) {
                    for (int c = 0; c < n; ++c) {
                        P3 p = point_of_sticker(n, f2, r, c);
                        int axis_coord = fa[face].axis == 0 ? p.x : (fa[face].axis == 1 ? p.y : p.z);
                        bool in_layer =
                            fa[face].max_side ? axis_coord >= two_n - 2 : axis_coord <= 2;
                        if (!in_layer) continue;
                        P3 q = rotate_point(n, p, fa[face].axis, dir);
                        int src = (f2 * n + r) * n + c;
                        perm[src] = sticker_of_point(n, q);
                    }
                }
            }
            cm.moves.push_back(std::move(perm));
        }
    }
    return cm;
}

const CubeMoves& cube_moves(int n) {
    static std::mutex mu;
    static std::map<int, CubeMoves> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_cube_moves(n)).first;
    return it->second;
}

}  // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::SlidingTile: return "sliding_tile";
        case Family::LightsOut: return "lights_out";
        default: return "rubiks_cube";
    }
}

Family family_from_name(const std::string& name) {
    if (name == "sliding_tile") return Family::SlidingTile;
    if (name == "lights_out") return Family::LightsOut;
    if (name == "rubiks_cube") return Family::RubiksCube;
    throw ConfigError("unknown family: " + name);
}

void validate_spec(const StateSpaceSpec& spec) {
    if (spec.unit_cost <= 0.0) throw ConfigError("unit_cost must be > 0");
    switch (spec.family) {
        case Family::SlidingTile: {
            if (spec.size < 3) throw ConfigError("sliding_tile size must be >= 3");
            int side = grid_side(spec);
            if (side * side != spec.size + 1)
                throw ConfigError("sliding_tile size+1 must be a perfect square");
            break;
        }
        case Family::LightsOut:
            if (spec.size < 1) throw ConfigError("lights_out size must be >= 1");
            break;
        case Family::RubiksCube:
            if (spec.size != 2 && spec.size != 3)
                throw ConfigError("rubiks_cube size must be 2 or 3");
            break;
    }
}

void validate_state(const StateSpaceSpec& spec, const PuzzleState& s) {
    switch (spec.family) {
        case Family::SlidingTile: {
            std::size_t n = static_cast<std::size_t>(spec.size) + 1;
            if (s.payload.size() != n)
                throw MalformedStateError("sliding_tile payload size mismatch");
            std::vector<char> seen(n, 0);
            for (std::uint8_t t : s.payload) {
                if (t >= n || seen[t]) throw MalformedStateError("payload is not a permutation");
                seen[t] = 1;
            }
            break;
        }
        case Family::LightsOut: {
            std::size_t n = static_cast<std::size_t>(spec.size) * spec.size;
            if (s.payload.size() != n) throw MalformedStateError("lights_out payload size mismatch");
            for (std::uint8_t b : s.payload)
                if (b > 1) throw MalformedStateError("lights_out cells must be 0/1");
            break;
        }
        case Family::RubiksCube: {
            std::size_t n = static_cast<std::size_t>(6) * spec.size * spec.size;
            if (s.payload.size() != n) throw MalformedStateError("cube payload size mismatch");
            std::array<int, 6> counts{};
            for (std::uint8_t c : s.payload) {
                if (c > 5) throw MalformedStateError("cube sticker color out of range");
                counts[c]++;
            }
            for (int c = 0; c < 6; ++c)
                if (counts[c] != spec.size * spec.size)
                    throw MalformedStateError("cube sticker multiset invalid");
            break;
        }
    }
}

int num_operators(const StateSpaceSpec& spec) {
    switch (spec.family) {
        case Family::SlidingTile: return 4;
        case Family::LightsOut: return spec.size * spec.size;
        default: return 12;
    }
}

std::string operator_name(const StateSpaceSpec& spec, int op) {
    switch (spec.family) {
        case Family::SlidingTile: {
            static const char* names[] = {"up", "down", "left", "right"};
            return names[op];
        }
        case Family::LightsOut: {
            int r = op / spec.size, c = op % spec.size;
            return "press(" + std::to_string(r) + "," + std::to_string(c) + ")";
        }
        default: {
            std::string s(1, kCubeFaces[op / 2]);
            if (op % 2 == 1) s += "'";
            return s;
        }
    }
}

int inverse_operator(const StateSpaceSpec& spec, int op) {
    switch (spec.family) {
        case Family::SlidingTile: return op ^ 1;  // up<->down, left<->right
        case Family::LightsOut: return op;        // presses are self-inverse
        default: return op ^ 1;                   // cw <-> ccw
    }
}

PuzzleState goal_state(const StateSpaceSpec& spec) {
    PuzzleState s;
    switch (spec.family) {
        case Family::SlidingTile:
            s.payload.resize(spec.size + 1);
            for (int i = 0; i < spec.size; ++i) s.payload[i] = static_cast<std::uint8_t>(i + 1);
            s.payload[spec.size] = 0;  // blank last
            break;
        case Family::LightsOut:
            s.payload.assign(static_cast<std::size_t>(spec.size) * spec.size, 0);
            break;
        case Family::RubiksCube: {
            int per_face = spec.size * spec.size;
            s.payload.resize(6 * per_face);
            for (int f = 0; f < 6; ++f)
                for (int i = 0; i < per_face; ++i)
                    s.payload[f * per_face + i] = static_cast<std::uint8_t>(f);
            break;
        }
    }
    return s;
}

bool is_goal(const StateSpaceSpec& spec, const PuzzleState& s) {
    validate_state(spec, s);
    switch (spec.family) {
        case Family::SlidingTile: {
            for (int i = 0; i < spec.size; ++i)
                if (s.payload[i] != i + 1) return false;
            return s.payload[spec.size] == 0;
        }
        case Family::LightsOut:
            return std::all_of(s.payload.begin(), s.payload.end(),
                               [](std::uint8_t b) { return b == 0; });
        case Family::RubiksCube: {
            int per_face = spec.size * spec.size;
            for (int f = 0; f < 6; ++f)
                for (int i = 0; i < per_face; ++i)
                    if (s.payload[f * per_face + i] != f) return false;
            return true;
        }
    }
    return false;
}

bool apply_operator(const StateSpaceSpec& spec, PuzzleState& s, int op) {
    switch (spec.family) {
        case Family::SlidingTile: {
            int side = grid_side(spec);
            int blank = static_cast<int>(
                std::find(s.payload.begin(), s.payload.end(), 0) - s.payload.begin());
            int r = blank / side, c = blank % side;
            static const int dr[] = {-1, +1, 0, 0};
            static const int dc[] = {0, 0, -1, +1};
            int nr = r + dr[op], nc = c + dc[op];
            if (nr < 0 || nr >= side || nc < 0 || nc >= side) return false;
            std::swap(s.payload[blank], s.payload[nr * side + nc]);
            return true;
        }
        case Family::LightsOut: {
            int n = spec.size;
            int r = op / n, c = op % n;
            auto toggle = [&](int rr, int cc) {
                if (rr >= 0 && rr < n && cc >= 0 && cc < n) s.payload[rr * n + cc] ^= 1;
            };
            toggle(r, c);
            toggle(r - 1, c);
            toggle(r + 1, c);
            toggle(r, c - 1);
            toggle(r, c + 1);
            return true;
        }
        case Family::RubiksCube: {
            const auto& perm = cube_moves(spec.size).moves[op];
            std::vector<std::uint8_t> out(s.payload.size());
            for (std::size_t i = 0; i < perm.size(); ++i) out[perm[i]] = s.payload[i];
            s.payload = std::move(out);
            return true;
        }
    }
    return false;
}

std::vector<Successor> successors(const StateSpaceSpec& spec, const PuzzleState& s) {
    validate_state(spec, s);
    std::vector<Successor> out;
    int nops = num_operators(spec);
    out.reserve(nops);
    for (int op = 0; op < nops; ++op) {
        PuzzleState next = s;
        if (!apply_operator(spec, next, op)) continue;
        out.push_back({std::move(next), spec.unit_cost, op});
    }
    return out;
}

PuzzleState scramble(const StateSpaceSpec& spec, int depth, std::mt19937_64& rng) {
    PuzzleState s = goal_state(spec);
    for (int i = 0; i < depth; ++i) {
        // Pick uniformly among operators legal in the current state.
        std::vector<int> legal;
        int nops = num_operators(spec);
        legal.reserve(nops);
        for (int op = 0; op < nops; ++op) {
            PuzzleState probe = s;
            if (apply_operator(spec, probe, op)) legal.push_back(op);
        }
        std::uniform_int_distribution<std::size_t> pick(0, legal.size() - 1);
        apply_operator(spec, s, legal[pick(rng)]);
    }
    return s;
}

std::size_t encode_dim(const StateSpaceSpec& spec) {
    switch (spec.family) {
        case Family::SlidingTile: {
            std::size_t n = static_cast<std::size_t>(spec.size) + 1;
            return n * n;
        }
        case Family::LightsOut:
            return static_cast<std::size_t>(spec.size) * spec.size;
        default:
            return static_cast<std::size_t>(6) * spec.size * spec.size * 6;
    }
}

void encode_into(const StateSpaceSpec& spec, const PuzzleState& s, double* out) {
    std::size_t dim = encode_dim(spec);
    std::fill(out, out + dim, 0.0);
    switch (spec.family) {
        case Family::SlidingTile: {
            std::size_t n = s.payload.size();
            for (std::size_t cell = 0; cell < n; ++cell) out[cell * n + s.payload[cell]] = 1.0;
            break;
        }
        case Family::LightsOut:
            for (std::size_t i = 0; i < s.payload.size(); ++i) out[i] = s.payload[i];
            break;
        case Family::RubiksCube:
            for (std::size_t i = 0; i < s.payload.size(); ++i) out[i * 6 + s.payload[i]] = 1.0;
            break;
    }
}

std::vector<double> encode(const StateSpaceSpec& spec, const PuzzleState& s) {
    validate_state(spec, s);
    std::vector<double> v(encode_dim(spec));
    encode_into(spec, s, v.data());
    return v;
}

bool sliding_tile_solvable(const StateSpaceSpec& spec, const PuzzleState& s) {
    validate_state(spec, s);
    int side = grid_side(spec);
    // Inversions over the tile sequence with the blank removed.
    std::vector<int> tiles;
    int blank_row = 0;
    for (std::size_t i = 0; i < s.payload.size(); ++i) {
        if (s.payload[i] == 0)
            blank_row = static_cast<int>(i) / side;
        else
            tiles.push_back(s.payload[i]);
    }
    int inv = 0;
    for (std::size_t i = 0; i < tiles.size(); ++i)
        for (std::size_t j = i + 1; j < tiles.size(); ++j)
            if (tiles[i] > tiles[j]) ++inv;
    if (side % 2 == 1) return inv % 2 == 0;
    // Even width: parity couples with the blank row counted from the bottom.
    // Goal has the blank on the last row (distance 0, even) and 0 inversions.
    int blank_from_bottom = side - 1 - blank_row;
    return (inv + blank_from_bottom) % 2 == 0;
}

}  // namespace hlearn
