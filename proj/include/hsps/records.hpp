#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hsps/domain.hpp"
#include "hsps/estimator.hpp"
#include "hsps/figures.hpp"
#include "hsps/simulator.hpp"

// Plain-text formats shared by the CLI and its callers.
//
// Every file is a list of `key=value` lines, optionally grouped under
// `[section]` headers. Blank lines and lines starting with '#' are ignored.
// Keys before the first header belong to the unnamed section "". Numbers are
// written in shortest round-trip form, so reading a file back reproduces
// every value bit for bit.
namespace hsps::io {

class KeyValueDoc {
public:
    using Entries = std::vector<std::pair<std::string, std::string>>;

    static KeyValueDoc parse(std::string_view text);

    void set(const std::string& section, const std::string& key, std::string value);
    void add(const std::string& section, const std::string& key, std::string value);

    [[nodiscard]] bool has_section(const std::string& section) const;
    [[nodiscard]] const Entries& entries(const std::string& section) const;
    [[nodiscard]] std::optional<std::string> find(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::vector<std::string> find_all(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::optional<double> number(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::optional<std::uint64_t> integer(const std::string& section, const std::string& key) const;

    /// Throws ValidationError if `section` holds a key outside `allowed`.
    void require_known_keys(const std::string& section, const std::vector<std::string_view>& allowed) const;

    [[nodiscard]] std::string str() const;

private:
    std::vector<std::string> order_;
    std::map<std::string, Entries> sections_;
};

std::string format_number(double v);

void put_counts(KeyValueDoc& doc, const std::string& section, const sim::RawCounts& counts);
sim::RawCounts get_counts(const KeyValueDoc& doc, const std::string& section);

void put_window(KeyValueDoc& doc, const std::string& section, const sim::TrueWindowStats& stats);
sim::TrueWindowStats get_window(const KeyValueDoc& doc, const std::string& section);

void put_figures(KeyValueDoc& doc, const std::string& section, const FiguresOfMerit& fom);
FiguresOfMerit get_figures(const KeyValueDoc& doc, const std::string& section);

/// Counts record; reads the [counts] section when present, otherwise the
/// unnamed one.
std::string write_raw_counts(const sim::RawCounts& counts);
sim::RawCounts read_raw_counts(std::string_view text);

/// Simulator output: [counts] and [window] sections.
std::string write_sim_result(const sim::SimResult& result);

std::string write_figures(const FiguresOfMerit& fom);
FiguresOfMerit read_figures(std::string_view text);

/// Run settings stored in the [sim] section of a configuration file.
struct SimSettings {
    double duration = 1.0;
    std::uint64_t seed = 1;
    std::size_t replicas = 1;
    sim::EventMode mode = sim::EventMode::restricted;
    double idler_dead_time = 0.0;
};

/// Configuration file: [scenario], [source], [trigger], [idler], [bench],
/// [sim] and [expected] sections. Keys equal the SourceParams / BenchParams
/// field names. In [trigger], `herald_rate` may replace
/// `trigger_transmission`, which is then derived from it.
struct ConfigFile {
    Scenario scenario;
    est::BenchParams bench;
    SimSettings sim;
};

ConfigFile read_config(std::string_view text);
std::string write_config(const Scenario& scenario, const std::optional<SimSettings>& sim = std::nullopt);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace hsps::io
