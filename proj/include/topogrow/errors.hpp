#pragma once

#include <stdexcept>
#include <string>

namespace topogrow {

/// Mesh or grid violates a structural requirement (non-manifold edge,
/// inconsistent winding, odd Euler characteristic, disconnected input, ...).
struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-adjacent triangles with coincident centroids; the pair kernel is undefined.
struct SingularConfigurationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PlacementError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GrowthStalledError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DisplacementError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Tile constraints admit no assignment within the restart budget.
struct UnsatisfiableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace topogrow
