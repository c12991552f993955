#include "hsps/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "hsps/errors.hpp"
#include "hsps/rng.hpp"

namespace hsps::sim {

namespace {

// Stream identifiers within a replica.
enum Stream : std::uint64_t {
    kPairs = 1,
    kTriggerDark = 2,
    kBackground = 3,
    kFates = 4,
    kIdlerDark = 5,
};

struct Gate {
    double center;
    bool dark;  // opened by a trigger dark count
};

struct Photon {
    double t;
    bool heralding;  // opened the gate centred on t
};

struct Segment {
    double begin;
    double end;
};

/// Calls emit(t) for each point of a Poisson process on [begin, end).
template <class Fn>
void poisson_process(Rng& rng, double rate, double begin, double end, Fn&& emit)
{
    if (rate <= 0.0) {
        return;
    }
    std::exponential_distribution<double> gap(rate);
    for (double t = begin + gap(rng); t < end; t += gap(rng)) {
        emit(t);
    }
}

std::vector<Segment> merge_spans(const std::vector<Gate>& gates, double half)
{
    std::vector<Segment> out;
    for (const Gate& g : gates) {
        double b = g.center - half;
        double e = g.center + half;
        if (!out.empty() && b <= out.back().end) {
            out.back().end = std::max(out.back().end, e);
        } else {
            out.push_back({b, e});
        }
    }
    return out;
}

/// Poisson points at `rate` restricted to a sorted list of disjoint
/// segments, generated on the concatenated length and mapped back.
std::vector<double> poisson_on_segments(Rng& rng, double rate, const std::vector<Segment>& segments)
{
    std::vector<double> out;
    if (rate <= 0.0 || segments.empty()) {
        return out;
    }
    std::exponential_distribution<double> gap(rate);
    double s = gap(rng);
    double offset = 0.0;  // compressed coordinate of the current segment start
    for (const Segment& seg : segments) {
        double len = seg.end - seg.begin;
        while (s < offset + len) {
            out.push_back(seg.begin + (s - offset));
            s += gap(rng);
        }
        offset += len;
    }
    return out;
}

struct ReplicaOutput {
    RawCounts counts;
    TrueWindowStats window;
};

class ReplicaRunner {
public:
    ReplicaRunner(const SimConfig& config, std::size_t replica)
        : cfg_(config), p_(config.params), replica_(replica), half_(config.params.delta_t / 2.0),
          margin_(config.params.delta_t)
    {
    }

    ReplicaOutput run()
    {
        std::vector<Gate> gates;
        std::vector<Photon> photons;
        if (cfg_.mode == EventMode::restricted) {
            generate_restricted(gates, photons);
        } else {
            generate_brute_force(gates, photons);
        }
        return tally(gates, photons);
    }

private:
    Rng stream(Stream s) const { return make_rng(cfg_.seed, replica_, s); }

    [[nodiscard]] bool in_run(double t) const { return t >= 0.0 && t < cfg_.duration; }

    std::vector<double> dark_heralds() const
    {
        Rng rng = stream(kTriggerDark);
        std::vector<double> out;
        poisson_process(rng, p_.dark_rate_trigger, 0.0, cfg_.duration, [&](double t) { out.push_back(t); });
        return out;
    }

    static std::vector<Gate> make_gates(const std::vector<double>& heralded, const std::vector<double>& dark)
    {
        std::vector<Gate> gates;
        gates.reserve(heralded.size() + dark.size());
        for (double t : heralded) {
            gates.push_back({t, false});
        }
        for (double t : dark) {
            gates.push_back({t, true});
        }
        std::stable_sort(gates.begin(), gates.end(), [](const Gate& a, const Gate& b) { return a.center < b.center; });
        return gates;
    }

    void generate_restricted(std::vector<Gate>& gates, std::vector<Photon>& photons) const
    {
        // Thinning splits the pair process into independent heralded and
        // unheralded Poisson processes.
        double ph = p_.heralding_probability();
        Rng pair_rng = stream(kPairs);
        std::vector<double> heralded_pairs;
        poisson_process(pair_rng, p_.mu * ph, -margin_, cfg_.duration + margin_,
                        [&](double t) { heralded_pairs.push_back(t); });

        std::vector<double> gate_times;
        for (double t : heralded_pairs) {
            if (in_run(t)) {
                gate_times.push_back(t);
            }
        }
        gates = make_gates(gate_times, dark_heralds());

        Rng bg_rng = stream(kBackground);
        std::vector<double> others = poisson_on_segments(bg_rng, p_.mu * (1.0 - ph), merge_spans(gates, half_));

        photons.reserve(heralded_pairs.size() + others.size());
        std::size_t i = 0;
        std::size_t j = 0;
        while (i < heralded_pairs.size() || j < others.size()) {
            if (j == others.size() || (i < heralded_pairs.size() && heralded_pairs[i] <= others[j])) {
                photons.push_back({heralded_pairs[i], in_run(heralded_pairs[i])});
                ++i;
            } else {
                photons.push_back({others[j], false});
                ++j;
            }
        }
    }

    void generate_brute_force(std::vector<Gate>& gates, std::vector<Photon>& photons) const
    {
        double ph = p_.heralding_probability();
        double begin = -margin_;
        double end = cfg_.duration + margin_;

        // Pass 1: herald times. Pass 2 replays the same stream and keeps the
        // pairs that fall inside a gate span.
        auto replay = [&](auto&& visit) {
            Rng rng = stream(kPairs);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            poisson_process(rng, p_.mu, begin, end, [&](double t) { visit(t, unit(rng) < ph); });
        };

        std::vector<double> gate_times;
        replay([&](double t, bool heralded) {
            if (heralded && in_run(t)) {
                gate_times.push_back(t);
            }
        });
        gates = make_gates(gate_times, dark_heralds());
        std::vector<Segment> spans = merge_spans(gates, half_);

        std::size_t k = 0;
        replay([&](double t, bool heralded) {
            while (k < spans.size() && spans[k].end <= t) {
                ++k;
            }
            if (k < spans.size() && t >= spans[k].begin) {
                photons.push_back({t, heralded && in_run(t)});
            }
        });
    }

    ReplicaOutput tally(const std::vector<Gate>& gates, const std::vector<Photon>& photons) const
    {
        struct Fate {
            bool survives;
            bool to_a;
            bool detected;
        };
        Rng fate_rng = stream(kFates);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<Fate> fates(photons.size());
        for (Fate& f : fates) {
            f.survives = unit(fate_rng) < p_.gamma;
            f.to_a = unit(fate_rng) < p_.splitter_t;
            f.detected = unit(fate_rng) < p_.eta_idler;
        }

        Rng dark_rng = stream(kIdlerDark);
        double p_dark = std::min(1.0, p_.dark_rate_idler * p_.delta_t);

        ReplicaOutput out;
        RawCounts& c = out.counts;
        TrueWindowStats& w = out.window;
        auto bump = [](std::vector<std::uint64_t>& h, std::size_t k) {
            if (h.size() <= k) {
                h.resize(k + 1, 0);
            }
            ++h[k];
        };

        double last_a = -std::numeric_limits<double>::infinity();
        double last_b = last_a;
        std::size_t lo = 0;
        for (const Gate& g : gates) {
            double b = g.center - half_;
            double e = g.center + half_;
            while (lo < photons.size() && photons[lo].t < b) {
                ++lo;
            }
            std::size_t inside = 0;
            std::size_t background = 0;
            bool fire_a = false;
            bool fire_b = false;
            for (std::size_t j = lo; j < photons.size() && photons[j].t < e; ++j) {
                const Fate& f = fates[j];
                if (!f.survives) {
                    continue;
                }
                ++inside;
                bool own = !g.dark && photons[j].heralding && photons[j].t == g.center;
                if (!own) {
                    ++background;
                }
                if (f.to_a) {
                    ++w.branch_a;
                    fire_a = fire_a || f.detected;
                } else {
                    ++w.branch_b;
                    fire_b = fire_b || f.detected;
                }
            }
            if (p_dark > 0.0) {
                fire_a = (unit(dark_rng) < p_dark) || fire_a;
                fire_b = (unit(dark_rng) < p_dark) || fire_b;
            }
            if (cfg_.idler_dead_time > 0.0) {
                fire_a = fire_a && g.center - last_a >= cfg_.idler_dead_time;
                fire_b = fire_b && g.center - last_b >= cfg_.idler_dead_time;
                if (fire_a) {
                    last_a = g.center;
                }
                if (fire_b) {
                    last_b = g.center;
                }
            }
            c.singles_a += fire_a ? 1 : 0;
            c.singles_b += fire_b ? 1 : 0;
            c.coincidences += (fire_a && fire_b) ? 1 : 0;
            bump(w.histogram, inside);
            bump(w.background_histogram, background);
        }
        c.heralds = gates.size();
        c.gates_opened = gates.size();
        c.singles = c.singles_a + c.singles_b;
        c.duration = cfg_.duration;
        c.params_hash = params_hash(p_);
        return out;
    }

    const SimConfig& cfg_;
    const SourceParams& p_;
    std::size_t replica_;
    double half_;
    double margin_;
};

void add_histogram(std::vector<std::uint64_t>& into, const std::vector<std::uint64_t>& from)
{
    if (into.size() < from.size()) {
        into.resize(from.size(), 0);
    }
    for (std::size_t k = 0; k < from.size(); ++k) {
        into[k] += from[k];
    }
}

}  // namespace

std::uint64_t TrueWindowStats::gates() const
{
    return std::accumulate(histogram.begin(), histogram.end(), std::uint64_t{0});
}

std::uint64_t TrueWindowStats::surviving_photons() const
{
    std::uint64_t total = 0;
    for (std::size_t k = 0; k < histogram.size(); ++k) {
        total += k * histogram[k];
    }
    return total;
}

std::vector<std::string> validate(const SimConfig& config)
{
    std::vector<std::string> warnings = hsps::validate(config.params).warnings;
    if (!(config.duration > 0.0) || !std::isfinite(config.duration)) {
        throw ValidationError(fmt::format("duration = {} must be positive", config.duration));
    }
    if (config.replicas < 1) {
        throw ValidationError("replicas must be >= 1");
    }
    if (!(config.idler_dead_time >= 0.0)) {
        throw ValidationError("idler_dead_time must be >= 0");
    }
    double n_t = config.params.herald_rate();
    double expected = n_t * config.duration * static_cast<double>(config.replicas);
    if (expected < 1000.0) {
        warnings.push_back(fmt::format("only {:.0f} heralds expected; counts are not statistically meaningful", expected));
    }
    if (n_t * config.params.delta_t > 0.1) {
        warnings.push_back(fmt::format("herald rate * delta_t = {:.3g}: gates overlap frequently",
                                       n_t * config.params.delta_t));
    }
    return warnings;
}

SimResult simulate(const SimConfig& config)
{
    SimResult result;
    result.warnings = validate(config);

    std::vector<ReplicaOutput> outputs(config.replicas);
    unsigned n_threads = config.threads == 0 ? default_thread_count() : config.threads;
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, config.replicas));
    if (n_threads <= 1) {
        for (std::size_t r = 0; r < config.replicas; ++r) {
            outputs[r] = ReplicaRunner(config, r).run();
        }
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n_threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t r = t; r < config.replicas; r += n_threads) {
                    outputs[r] = ReplicaRunner(config, r).run();
                }
            });
        }
    }

    std::vector<TrueWindowStats> windows;
    for (ReplicaOutput& o : outputs) {
        result.replica_counts.push_back(o.counts);
        windows.push_back(std::move(o.window));
    }
    result.counts = merge_replicas(result.replica_counts);
    result.window = merge_window_stats(windows);
    return result;
}

WindowDistribution true_window_distribution(const TrueWindowStats& stats)
{
    std::uint64_t total = stats.gates();
    if (total == 0) {
        throw DomainError("true_window_distribution: no gates recorded");
    }
    auto at = [&](std::size_t k) { return k < stats.histogram.size() ? stats.histogram[k] : 0; };
    auto n = static_cast<double>(total);
    WindowDistribution d;
    d.p0 = static_cast<double>(at(0)) / n;
    d.p1 = static_cast<double>(at(1)) / n;
    d.p2plus = static_cast<double>(total - at(0) - at(1)) / n;
    return d;
}

double empty_background_fraction(const TrueWindowStats& stats)
{
    std::uint64_t total = stats.gates();
    if (total == 0 || stats.background_histogram.empty()) {
        throw DomainError("empty_background_fraction: no gates recorded");
    }
    return static_cast<double>(stats.background_histogram[0]) / static_cast<double>(total);
}

RawCounts merge_replicas(std::span<const RawCounts> counts)
{
    if (counts.empty()) {
        throw MergeError("merge_replicas: nothing to merge");
    }
    RawCounts out = counts.front();
    out.duration = 0.0;
    out.heralds = out.singles = out.singles_a = out.singles_b = out.coincidences = out.gates_opened = 0;
    for (const RawCounts& c : counts) {
        if (c.params_hash != counts.front().params_hash) {
            throw MergeError("merge_replicas: replicas were generated with different parameters");
        }
        if (c.duration != counts.front().duration) {
            throw MergeError(fmt::format("merge_replicas: durations differ ({} vs {})", c.duration,
                                         counts.front().duration));
        }
        out.heralds += c.heralds;
        out.singles += c.singles;
        out.singles_a += c.singles_a;
        out.singles_b += c.singles_b;
        out.coincidences += c.coincidences;
        out.gates_opened += c.gates_opened;
        out.duration += c.duration;
    }
    return out;
}

TrueWindowStats merge_window_stats(std::span<const TrueWindowStats> stats)
{
    TrueWindowStats out;
    for (const TrueWindowStats& s : stats) {
        add_histogram(out.histogram, s.histogram);
        add_histogram(out.background_histogram, s.background_histogram);
        out.branch_a += s.branch_a;
        out.branch_b += s.branch_b;
    }
    return out;
}

}  // namespace hsps::sim
