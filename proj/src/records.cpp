#include "hsps/records.hpp"

#include <algorithm>
#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "hsps/errors.hpp"

namespace hsps::io {

namespace {

std::string_view trim(std::string_view s)
{
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

const KeyValueDoc::Entries kNoEntries;

}  // namespace

KeyValueDoc KeyValueDoc::parse(std::string_view text)
{
    KeyValueDoc doc;
    std::string section;
    std::size_t line_no = 0;
    while (!text.empty()) {
        std::size_t nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ValidationError(fmt::format("line {}: unterminated section header", line_no));
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!doc.has_section(section)) {
                doc.order_.push_back(section);
                doc.sections_[section];
            }
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError(fmt::format("line {}: expected key=value, got '{}'", line_no, line));
        }
        std::string key(trim(line.substr(0, eq)));
        if (key.empty()) {
            throw ValidationError(fmt::format("line {}: empty key", line_no));
        }
        doc.add(section, key, std::string(trim(line.substr(eq + 1))));
    }
    return doc;
}

void KeyValueDoc::set(const std::string& section, const std::string& key, std::string value)
{
    if (!has_section(section)) {
        order_.push_back(section);
    }
    Entries& e = sections_[section];
    auto it = std::find_if(e.begin(), e.end(), [&](const auto& kv) { return kv.first == key; });
    if (it != e.end()) {
        it->second = std::move(value);
    } else {
        e.emplace_back(key, std::move(value));
    }
}

void KeyValueDoc::add(const std::string& section, const std::string& key, std::string value)
{
    if (!has_section(section)) {
        order_.push_back(section);
    }
    sections_[section].emplace_back(key, std::move(value));
}

bool KeyValueDoc::has_section(const std::string& section) const
{
    return sections_.contains(section);
}

const KeyValueDoc::Entries& KeyValueDoc::entries(const std::string& section) const
{
    auto it = sections_.find(section);
    return it == sections_.end() ? kNoEntries : it->second;
}

std::optional<std::string> KeyValueDoc::find(const std::string& section, const std::string& key) const
{
    std::optional<std::string> found;
    for (const auto& [k, v] : entries(section)) {
        if (k == key) {
            found = v;
        }
    }
    return found;
}

std::vector<std::string> KeyValueDoc::find_all(const std::string& section, const std::string& key) const
{
    std::vector<std::string> out;
    for (const auto& [k, v] : entries(section)) {
        if (k == key) {
            out.push_back(v);
        }
    }
    return out;
}

std::optional<double> KeyValueDoc::number(const std::string& section, const std::string& key) const
{
    auto raw = find(section, key);
    if (!raw) {
        return std::nullopt;
    }
    double v = 0.0;
    const char* end = raw->data() + raw->size();
    auto [ptr, ec] = std::from_chars(raw->data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ValidationError(fmt::format("[{}] {} = '{}' is not a number", section, key, *raw));
    }
    return v;
}

std::optional<std::uint64_t> KeyValueDoc::integer(const std::string& section, const std::string& key) const
{
    auto raw = find(section, key);
    if (!raw) {
        return std::nullopt;
    }
    std::uint64_t v = 0;
    const char* end = raw->data() + raw->size();
    auto [ptr, ec] = std::from_chars(raw->data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ValidationError(fmt::format("[{}] {} = '{}' is not a non-negative integer", section, key, *raw));
    }
    return v;
}

void KeyValueDoc::require_known_keys(const std::string& section, const std::vector<std::string_view>& allowed) const
{
    for (const auto& [k, v] : entries(section)) {
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
            throw ValidationError(fmt::format("unknown key '{}' in section [{}]", k, section));
        }
    }
}

std::string KeyValueDoc::str() const
{
    std::string out;
    for (const std::string& section : order_) {
        const Entries& e = sections_.at(section);
        if (!section.empty()) {
            if (!out.empty()) {
                out += '\n';
            }
            out += fmt::format("[{}]\n", section);
        }
        for (const auto& [k, v] : e) {
            out += fmt::format("{}={}\n", k, v);
        }
    }
    return out;
}

std::string format_number(double v)
{
    return fmt::format("{}", v);
}

namespace {

double require_number(const KeyValueDoc& doc, const std::string& section, const std::string& key)
{
    auto v = doc.number(section, key);
    if (!v) {
        throw ValidationError(fmt::format("missing key '{}' in section [{}]", key, section));
    }
    return *v;
}

std::uint64_t require_integer(const KeyValueDoc& doc, const std::string& section, const std::string& key)
{
    auto v = doc.integer(section, key);
    if (!v) {
        throw ValidationError(fmt::format("missing key '{}' in section [{}]", key, section));
    }
    return *v;
}

bool parse_bool(const std::string& raw, const std::string& key)
{
    if (raw == "true" || raw == "1") {
        return true;
    }
    if (raw == "false" || raw == "0") {
        return false;
    }
    throw ValidationError(fmt::format("{} = '{}' is not a boolean", key, raw));
}

}  // namespace

void put_counts(KeyValueDoc& doc, const std::string& section, const sim::RawCounts& c)
{
    doc.set(section, "heralds", std::to_string(c.heralds));
    doc.set(section, "singles", std::to_string(c.singles));
    doc.set(section, "singles_a", std::to_string(c.singles_a));
    doc.set(section, "singles_b", std::to_string(c.singles_b));
    doc.set(section, "coincidences", std::to_string(c.coincidences));
    doc.set(section, "gates_opened", std::to_string(c.gates_opened));
    doc.set(section, "duration", format_number(c.duration));
    doc.set(section, "params_hash", std::to_string(c.params_hash));
    // Rates are informational and ignored when reading.
    if (c.duration > 0.0) {
        doc.set(section, "herald_rate", format_number(c.herald_rate()));
        doc.set(section, "singles_rate", format_number(c.singles_rate()));
        doc.set(section, "coincidence_rate", format_number(c.coincidence_rate()));
    }
}

sim::RawCounts get_counts(const KeyValueDoc& doc, const std::string& section)
{
    doc.require_known_keys(section, {"heralds", "singles", "singles_a", "singles_b", "coincidences", "gates_opened",
                                     "duration", "params_hash", "herald_rate", "singles_rate", "coincidence_rate"});
    sim::RawCounts c;
    c.heralds = require_integer(doc, section, "heralds");
    c.singles = require_integer(doc, section, "singles");
    c.coincidences = require_integer(doc, section, "coincidences");
    c.duration = require_number(doc, section, "duration");
    c.singles_a = doc.integer(section, "singles_a").value_or(0);
    c.singles_b = doc.integer(section, "singles_b").value_or(0);
    c.gates_opened = doc.integer(section, "gates_opened").value_or(c.heralds);
    c.params_hash = doc.integer(section, "params_hash").value_or(0);
    if (!(c.duration > 0.0)) {
        throw ValidationError("counts record: duration must be positive");
    }
    if (c.coincidences > c.singles) {
        throw ValidationError("counts record: more coincidences than singles");
    }
    return c;
}

void put_window(KeyValueDoc& doc, const std::string& section, const sim::TrueWindowStats& w)
{
    doc.set(section, "gates", std::to_string(w.gates()));
    doc.set(section, "branch_a", std::to_string(w.branch_a));
    doc.set(section, "branch_b", std::to_string(w.branch_b));
    for (std::size_t k = 0; k < w.histogram.size(); ++k) {
        doc.set(section, fmt::format("hist_{}", k), std::to_string(w.histogram[k]));
    }
    for (std::size_t k = 0; k < w.background_histogram.size(); ++k) {
        doc.set(section, fmt::format("background_{}", k), std::to_string(w.background_histogram[k]));
    }
}

sim::TrueWindowStats get_window(const KeyValueDoc& doc, const std::string& section)
{
    sim::TrueWindowStats w;
    auto store = [](std::vector<std::uint64_t>& h, std::size_t k, std::uint64_t v) {
        if (h.size() <= k) {
            h.resize(k + 1, 0);
        }
        h[k] = v;
    };
    for (const auto& [key, raw] : doc.entries(section)) {
        auto index_of = [&](std::string_view prefix) -> std::optional<std::size_t> {
            if (!key.starts_with(prefix)) {
                return std::nullopt;
            }
            std::size_t k = 0;
            const char* b = key.data() + prefix.size();
            const char* e = key.data() + key.size();
            auto [ptr, ec] = std::from_chars(b, e, k);
            if (ec != std::errc{} || ptr != e) {
                throw ValidationError(fmt::format("bad histogram key '{}'", key));
            }
            return k;
        };
        if (auto k = index_of("hist_")) {
            store(w.histogram, *k, *doc.integer(section, key));
        } else if (auto k2 = index_of("background_")) {
            store(w.background_histogram, *k2, *doc.integer(section, key));
        } else if (key != "gates" && key != "branch_a" && key != "branch_b") {
            throw ValidationError(fmt::format("unknown key '{}' in section [{}]", key, section));
        }
    }
    w.branch_a = doc.integer(section, "branch_a").value_or(0);
    w.branch_b = doc.integer(section, "branch_b").value_or(0);
    return w;
}

void put_figures(KeyValueDoc& doc, const std::string& section, const FiguresOfMerit& fom)
{
    doc.set(section, "p1", format_number(fom.p1));
    doc.set(section, "p2", format_number(fom.p2));
    doc.set(section, "g2", format_number(fom.g2));
    if (fom.sigma_p1) {
        doc.set(section, "sigma_p1", format_number(*fom.sigma_p1));
    }
    if (fom.sigma_p2) {
        doc.set(section, "sigma_p2", format_number(*fom.sigma_p2));
    }
    if (fom.sigma_g2) {
        doc.set(section, "sigma_g2", format_number(*fom.sigma_g2));
    }
    if (fom.p2_upper_limit_only) {
        doc.set(section, "p2_upper_limit_only", "true");
    }
    for (const std::string& w : fom.warnings) {
        doc.add(section, "warning", w);
    }
}

FiguresOfMerit get_figures(const KeyValueDoc& doc, const std::string& section)
{
    doc.require_known_keys(section,
                           {"p1", "p2", "g2", "sigma_p1", "sigma_p2", "sigma_g2", "p2_upper_limit_only", "warning"});
    FiguresOfMerit fom;
    fom.p1 = require_number(doc, section, "p1");
    fom.p2 = require_number(doc, section, "p2");
    fom.g2 = require_number(doc, section, "g2");
    fom.sigma_p1 = doc.number(section, "sigma_p1");
    fom.sigma_p2 = doc.number(section, "sigma_p2");
    fom.sigma_g2 = doc.number(section, "sigma_g2");
    if (auto flag = doc.find(section, "p2_upper_limit_only")) {
        fom.p2_upper_limit_only = parse_bool(*flag, "p2_upper_limit_only");
    }
    fom.warnings = doc.find_all(section, "warning");
    return fom;
}

std::string write_raw_counts(const sim::RawCounts& counts)
{
    KeyValueDoc doc;
    put_counts(doc, "", counts);
    return "# raw counts\n" + doc.str();
}

sim::RawCounts read_raw_counts(std::string_view text)
{
    KeyValueDoc doc = KeyValueDoc::parse(text);
    return get_counts(doc, doc.has_section("counts") ? "counts" : "");
}

std::string write_sim_result(const sim::SimResult& result)
{
    KeyValueDoc doc;
    put_counts(doc, "counts", result.counts);
    put_window(doc, "window", result.window);
    for (const std::string& w : result.warnings) {
        doc.add("warnings", "warning", w);
    }
    return doc.str();
}

std::string write_figures(const FiguresOfMerit& fom)
{
    KeyValueDoc doc;
    put_figures(doc, "", fom);
    return doc.str();
}

FiguresOfMerit read_figures(std::string_view text)
{
    return get_figures(KeyValueDoc::parse(text), "");
}

ConfigFile read_config(std::string_view text)
{
    KeyValueDoc doc = KeyValueDoc::parse(text);
    doc.require_known_keys("", {});
    doc.require_known_keys("scenario", {"name", "provenance"});
    doc.require_known_keys("source",
                           {"mu", "delta_t", "gamma", "gamma_prep", "idler_loss_db", "coherence_time", "gamma_rounding_tol"});
    doc.require_known_keys("trigger", {"eta_trigger", "trigger_transmission", "dark_rate_trigger", "herald_rate"});
    doc.require_known_keys("idler", {"eta_idler", "dark_rate_idler"});
    doc.require_known_keys("bench", {"splitter_t", "correction_kappa", "multiphoton_correction"});
    doc.require_known_keys("sim", {"duration", "seed", "replicas", "mode", "idler_dead_time"});

    ConfigFile cfg;
    Scenario& sc = cfg.scenario;
    sc.name = doc.find("scenario", "name").value_or("custom");
    sc.provenance = doc.find("scenario", "provenance").value_or("");

    SourceParams& p = sc.params;
    p.mu = require_number(doc, "source", "mu");
    p.delta_t = require_number(doc, "source", "delta_t");
    p.gamma_prep = doc.number("source", "gamma_prep");
    p.idler_loss_db = doc.number("source", "idler_loss_db").value_or(0.0);
    if (auto g = doc.number("source", "gamma")) {
        p.gamma = *g;
    } else if (p.gamma_prep) {
        p.gamma = collection_from_preparation(*p.gamma_prep, p.idler_loss_db);
    } else {
        throw ValidationError("[source] needs gamma or gamma_prep");
    }
    p.coherence_time = doc.number("source", "coherence_time").value_or(p.coherence_time);
    p.gamma_rounding_tol = doc.number("source", "gamma_rounding_tol").value_or(p.gamma_rounding_tol);

    p.eta_trigger = require_number(doc, "trigger", "eta_trigger");
    p.dark_rate_trigger = doc.number("trigger", "dark_rate_trigger").value_or(0.0);
    auto transmission = doc.number("trigger", "trigger_transmission");
    auto herald_rate = doc.number("trigger", "herald_rate");
    if (transmission && herald_rate) {
        throw ValidationError("[trigger] give trigger_transmission or herald_rate, not both");
    }
    if (transmission) {
        p.trigger_transmission = *transmission;
    } else if (herald_rate) {
        p.trigger_transmission = derive_trigger_transmission(*herald_rate, p.dark_rate_trigger, p.eta_trigger, p.mu);
    }

    p.eta_idler = require_number(doc, "idler", "eta_idler");
    p.dark_rate_idler = doc.number("idler", "dark_rate_idler").value_or(0.0);
    p.splitter_t = doc.number("bench", "splitter_t").value_or(0.5);
    validate(p);

    cfg.bench = est::bench_from(p);
    cfg.bench.correction_kappa = doc.number("bench", "correction_kappa");
    if (auto flag = doc.find("bench", "multiphoton_correction")) {
        cfg.bench.multiphoton_correction = parse_bool(*flag, "multiphoton_correction");
    }

    SimSettings& s = cfg.sim;
    s.duration = doc.number("sim", "duration").value_or(s.duration);
    s.seed = doc.integer("sim", "seed").value_or(s.seed);
    s.replicas = doc.integer("sim", "replicas").value_or(s.replicas);
    s.idler_dead_time = doc.number("sim", "idler_dead_time").value_or(s.idler_dead_time);
    if (auto mode = doc.find("sim", "mode")) {
        if (*mode == "restricted") {
            s.mode = sim::EventMode::restricted;
        } else if (*mode == "brute_force") {
            s.mode = sim::EventMode::brute_force;
        } else {
            throw ValidationError(fmt::format("[sim] mode = '{}' (expected restricted or brute_force)", *mode));
        }
    }

    if (doc.has_section("expected")) {
        sc.expected = get_figures(doc, "expected");
    }
    return cfg;
}

std::string write_config(const Scenario& scenario, const std::optional<SimSettings>& sim)
{
    const SourceParams& p = scenario.params;
    KeyValueDoc doc;
    doc.set("scenario", "name", scenario.name);
    if (!scenario.provenance.empty()) {
        doc.set("scenario", "provenance", scenario.provenance);
    }
    doc.set("source", "mu", format_number(p.mu));
    doc.set("source", "delta_t", format_number(p.delta_t));
    doc.set("source", "gamma", format_number(p.gamma));
    if (p.gamma_prep) {
        doc.set("source", "gamma_prep", format_number(*p.gamma_prep));
    }
    doc.set("source", "idler_loss_db", format_number(p.idler_loss_db));
    doc.set("source", "coherence_time", format_number(p.coherence_time));
    doc.set("source", "gamma_rounding_tol", format_number(p.gamma_rounding_tol));
    doc.set("trigger", "eta_trigger", format_number(p.eta_trigger));
    doc.set("trigger", "trigger_transmission", format_number(p.trigger_transmission));
    doc.set("trigger", "dark_rate_trigger", format_number(p.dark_rate_trigger));
    doc.set("idler", "eta_idler", format_number(p.eta_idler));
    doc.set("idler", "dark_rate_idler", format_number(p.dark_rate_idler));
    doc.set("bench", "splitter_t", format_number(p.splitter_t));
    if (sim) {
        doc.set("sim", "duration", format_number(sim->duration));
        doc.set("sim", "seed", std::to_string(sim->seed));
        doc.set("sim", "replicas", std::to_string(sim->replicas));
        doc.set("sim", "mode", sim->mode == sim::EventMode::restricted ? "restricted" : "brute_force");
        doc.set("sim", "idler_dead_time", format_number(sim->idler_dead_time));
    }
    if (scenario.expected) {
        FiguresOfMerit e = *scenario.expected;
        e.warnings.clear();
        put_figures(doc, "expected", e);
    }
    return doc.str();
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError(fmt::format("cannot open '{}'", path));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError(fmt::format("cannot write '{}'", path));
    }
    out << text;
}

}  // namespace hsps::io
