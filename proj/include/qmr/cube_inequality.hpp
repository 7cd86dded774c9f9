#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qmr {

/// Closed axis box [lo, hi] inside [0,1]^n.
struct Box {
    std::vector<double> lo, hi;
};

/// One member of a cover: a finite union of boxes.
struct CubeSet {
    std::vector<Box> boxes;
};

struct CubeCover {
    int n = 2;
    std::vector<CubeSet> sets;
    /// Cells per axis of the membership grid; 0 picks the default for n.
    int grid_resolution = 0;

    std::size_t size() const { return sets.size(); }
    int resolution() const;
};

int default_grid_resolution(int n);

struct FaceChainResult {
    int axis = 1;                       ///< 1-based
    std::size_t d = 0;                  ///< sets in the shortest F_k to G_k chain
    std::vector<std::size_t> witness;   ///< set indices, F_k side first
};

struct LengthVolumeResult {
    std::size_t N = 0;
    std::vector<std::size_t> d;
    double product = 1.0;
    bool holds = true;
    std::vector<std::vector<std::size_t>> witnesses;
};

struct ChainCountMap {
    /// Sets kept after dropping redundant ones (indices into the input cover).
    std::vector<std::size_t> kept;
    std::vector<std::size_t> dropped;
    /// One grid cell centre per kept set, covered by that set alone.
    std::vector<std::vector<double>> witness_points;
    /// f0[i][k] for kept set i and axis k (0-based here).
    std::vector<std::vector<std::size_t>> f0;
    std::vector<std::size_t> d;
    bool face_claim_holds = true;      ///< sets meeting F_k have f0_k = 1
    bool far_face_claim_holds = true;  ///< sets meeting G_k have f0_k >= d_k
    std::size_t boundary_points_checked = 0;
};

/// Throws ParameterError/ShapeError on malformed input (empty sets, boxes
/// outside the cube, lo > hi).
void validate_cover(const CubeCover& cover);

/// Coverage of [0,1]^n on the membership grid (cell centres).
bool covers_cube(const CubeCover& cover);

bool boxes_intersect(const Box& a, const Box& b);
bool sets_intersect(const CubeSet& a, const CubeSet& b);
/// axis 0-based; far = false for F_k = {x_k = 0}, true for G_k = {x_k = 1}.
bool meets_face(const CubeSet& s, int axis, bool far);

/// Set nerve (closed intersections), adjacency lists.
std::vector<std::vector<std::size_t>> set_nerve(const CubeCover& cover);

/// axis is 1-based.
FaceChainResult face_chain_distance(const CubeCover& cover, int axis);
LengthVolumeResult check_length_volume(const CubeCover& cover);
ChainCountMap chain_count_map(const CubeCover& cover);

// Families.
CubeCover single_set_cover(int n);
/// m^n boxes of side 1/m, each widened by `inflation` and clipped.
CubeCover grid_cover(int n, int m, double inflation = 1e-6);
/// The two slabs [0,0.6] x [0,1]^{n-1} and [0.4,1] x [0,1]^{n-1}.
CubeCover slab_cover(int n);

struct RandomCoverOptions {
    double min_side = 0.05;
    double max_side = 0.5;
    double union_probability = 0.2;  ///< chance a set gets a second box
    int grid_resolution = 0;
    int max_attempts = 64;
};

/// Seeded random box cover with at most max_sets sets. Box corners sit on the
/// membership lattice, so grid coverage is exact coverage.
CubeCover random_box_cover(int n, std::size_t max_sets, std::uint64_t seed,
                           const RandomCoverOptions& options = {});

struct FuzzInstance {
    std::uint64_t seed = 0;
    std::size_t N = 0;
    std::vector<std::size_t> d;
    double product = 0.0;
    bool holds = true;
};

struct FuzzReport {
    int n = 2;
    std::size_t instances = 0;
    std::size_t max_sets = 0;
    std::size_t violations = 0;
    std::vector<FuzzInstance> records;
    /// Full dumps of violating instances.
    std::vector<CubeCover> falsifications;
    double seconds = 0.0;
};

FuzzReport fuzz_length_volume(int n, std::size_t instances, std::size_t max_sets,
                              std::uint64_t seed, const RandomCoverOptions& options = {});

}  // namespace qmr
