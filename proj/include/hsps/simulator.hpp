#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hsps/domain.hpp"

/// Monte Carlo of the bench: CW pair source, trigger arm with dark counts,
/// herald-gated idler windows, HBT beam splitter and two gated detectors.
///
/// Event model, per replica of length `duration`:
///  - pairs are a homogeneous Poisson process at rate mu; signal and idler
///    are emitted simultaneously;
///  - a pair heralds with probability eta_trigger * trigger_transmission and
///    trigger dark counts add an independent Poisson process at D_c;
///  - each herald opens one gate. In pair-emission time the gate spans
///    [t - dT/2, t + dT/2), so the heralding idler is always inside it and
///    any other pair emitted within the span is inside too;
///  - each idler survives the collection optics with probability gamma, is
///    routed to detector A with probability splitter_t (else B) and fires
///    its detector with probability eta_idler. A photon's fate is drawn once
///    even if it lies in several overlapping gates;
///  - each detector additionally fires from dark counts with probability
///    dark_rate_idler * dT per gate.
///
/// Counting convention: `singles` is the number of (gate, detector) pairs
/// with at least one firing, i.e. singles_a + singles_b. `coincidences` is
/// the number of gates where both detectors fired.
namespace hsps::sim {

enum class EventMode {
    /// Unheralded pairs are generated only inside the union of gate spans.
    restricted,
    /// Every pair over the run is generated (two passes over one stream).
    brute_force,
};

struct SimConfig {
    SourceParams params;
    double duration = 1.0;  ///< simulated seconds per replica
    std::uint64_t seed = 1;
    std::size_t replicas = 1;
    EventMode mode = EventMode::restricted;
    /// Idler detector dead time after a firing; 0 disables the model.
    double idler_dead_time = 0.0;
    /// Worker threads for replicas; 0 picks the hardware concurrency.
    unsigned threads = 0;
};

/// Tallies as a counting board would report them.
struct RawCounts {
    std::uint64_t heralds = 0;
    std::uint64_t singles = 0;
    std::uint64_t singles_a = 0;
    std::uint64_t singles_b = 0;
    std::uint64_t coincidences = 0;
    std::uint64_t gates_opened = 0;
    double duration = 0.0;
    /// params_hash() of the generating parameters; 0 when unknown.
    std::uint64_t params_hash = 0;

    [[nodiscard]] double herald_rate() const { return static_cast<double>(heralds) / duration; }
    [[nodiscard]] double singles_rate() const { return static_cast<double>(singles) / duration; }
    [[nodiscard]] double coincidence_rate() const { return static_cast<double>(coincidences) / duration; }

    bool operator==(const RawCounts&) const = default;
};

/// Ground truth at the source output (after gamma, before the HBT bench).
struct TrueWindowStats {
    /// histogram[k]: gates holding exactly k surviving idlers.
    std::vector<std::uint64_t> histogram;
    /// Same, excluding the gate's own heralding idler.
    std::vector<std::uint64_t> background_histogram;
    /// Surviving (gate, photon) incidences routed to A and B.
    std::uint64_t branch_a = 0;
    std::uint64_t branch_b = 0;

    [[nodiscard]] std::uint64_t gates() const;
    [[nodiscard]] std::uint64_t surviving_photons() const;

    bool operator==(const TrueWindowStats&) const = default;
};

struct SimResult {
    RawCounts counts;
    TrueWindowStats window;
    std::vector<RawCounts> replica_counts;
    std::vector<std::string> warnings;
};

/// Throws ValidationError / DomainError; returns warnings.
std::vector<std::string> validate(const SimConfig& config);

SimResult simulate(const SimConfig& config);

struct WindowDistribution {
    double p0 = 0.0;
    double p1 = 0.0;
    double p2plus = 0.0;
};

WindowDistribution true_window_distribution(const TrueWindowStats& stats);

/// Fraction of gates without any photon besides their own heralded idler.
double empty_background_fraction(const TrueWindowStats& stats);

/// Field-wise sum. All inputs must share params_hash and duration.
RawCounts merge_replicas(std::span<const RawCounts> counts);

TrueWindowStats merge_window_stats(std::span<const TrueWindowStats> stats);

}  // namespace hsps::sim
