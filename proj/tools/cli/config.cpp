#include "cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <thread>

#include "cli/csv.hpp"
#include "t1forge/error.hpp"
#include "t1forge/raw_io.hpp"

namespace t1forge::cli {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::FormatError, "config line " + std::to_string(line) + ": " + what);
}

std::string unquote(std::string_view v, std::size_t line) {
    const char q = v.front();
    if (v.size() < 2 || v.back() != q) fail(line, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        char c = v[i];
        if (q == '"' && c == '\\' && i + 2 < v.size()) {
            c = v[++i];
            switch (c) {
                case 'n': c = '\n'; break;
                case 't': c = '\t'; break;
                case '\\': case '"': break;
                default: fail(line, std::string("unsupported escape \\") + c);
            }
        }
        out.push_back(c);
    }
    return out;
}

std::string_view strip_comment(std::string_view s) {
    char quote = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (quote) {
            if (c == '\\' && quote == '"') ++i;
            else if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '#') {
            return s.substr(0, i);
        }
    }
    return s;
}

ConfigValue parse_value(std::string_view v, std::size_t line) {
    if (v.empty()) fail(line, "missing value");
    if (v.front() == '"' || v.front() == '\'') return unquote(v, line);
    if (v == "true") return true;
    if (v == "false") return false;
    std::string digits;
    for (char c : v) {
        if (c != '_') digits.push_back(c);
    }
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), i);
    if (ec == std::errc() && p == digits.data() + digits.size()) return i;
    char* end = nullptr;
    const double d = std::strtod(digits.c_str(), &end);
    if (end != digits.c_str() && *end == '\0') return d;
    fail(line, "cannot parse value '" + std::string(v) + "'");
}

std::string as_string(const ConfigValue& v, const std::string& key) {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    throw Error(ErrorCode::InvalidArgument, "config key '" + key + "' must be a string");
}

std::int64_t as_int(const ConfigValue& v, const std::string& key) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    throw Error(ErrorCode::InvalidArgument, "config key '" + key + "' must be an integer");
}

bool as_bool(const ConfigValue& v, const std::string& key) {
    if (const auto* b = std::get_if<bool>(&v)) return *b;
    throw Error(ErrorCode::InvalidArgument, "config key '" + key + "' must be a boolean");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

ProbabilitySource probability_from_string(const std::string& s) {
    if (s == "auto") return ProbabilitySource::Auto;
    if (s == "hard") return ProbabilitySource::HardLabels;
    if (s == "soft") return ProbabilitySource::Soft;
    throw Error(ErrorCode::InvalidArgument, "probability must be one of auto, hard, soft");
}

}  // namespace

std::map<std::string, ConfigValue> parse_toml(std::string_view text) {
    std::map<std::string, ConfigValue> out;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) fail(line_no, "malformed section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(line_no, "expected key = value");
        std::string_view key = trim(line.substr(0, eq));
        if (key.empty()) fail(line_no, "empty key");
        std::string k = (key.front() == '"' || key.front() == '\'') ? unquote(key, line_no) : std::string(key);
        if (!section.empty()) k = section + "." + k;
        if (out.count(k)) fail(line_no, "duplicate key '" + k + "'");
        out.emplace(std::move(k), parse_value(trim(line.substr(eq + 1)), line_no));
    }
    return out;
}

void apply_config(PipelineConfig& config, const std::map<std::string, ConfigValue>& values,
                  const std::filesystem::path& base_dir) {
    for (const auto& [full_key, value] : values) {
        std::string key = full_key;
        if (key.rfind("analyze.", 0) == 0) key = key.substr(8);
        if (key == "listing") config.listing = resolve(base_dir, as_string(value, key));
        else if (key == "samples") config.samples = static_cast<int>(as_int(value, key));
        else if (key == "seed") config.seed = static_cast<std::uint64_t>(as_int(value, key));
        else if (key == "qc_model") config.qc_model = resolve(base_dir, as_string(value, key));
        else if (key == "calibration") config.calibration = resolve(base_dir, as_string(value, key));
        else if (key == "blood_model") config.blood_model = resolve(base_dir, as_string(value, key));
        else if (key == "fit_blood") config.fit_blood = as_bool(value, key);
        else if (key == "output") config.output = resolve(base_dir, as_string(value, key));
        else if (key == "threads") config.threads = static_cast<int>(as_int(value, key));
        else if (key == "slice") config.slice = static_cast<int>(as_int(value, key));
        else if (key == "probability") config.probability = probability_from_string(as_string(value, key));
        else throw Error(ErrorCode::InvalidArgument, "unknown config key '" + full_key + "'");
    }
}

void PipelineConfig::validate() const {
    auto invalid = [](const std::string& m) { throw Error(ErrorCode::InvalidArgument, m); };
    if (samples < 1) invalid("samples (T) must be at least 1");
    if (threads < 1) invalid("threads must be at least 1");
    if (slice < 0) invalid("slice must be non-negative");
    if (output.empty()) invalid("an output directory is required");
    if (listing.empty() && subjects.empty()) invalid("a subject listing is required");
    if (qc_model.has_value() == calibration.has_value()) {
        invalid("exactly one of qc_model and calibration must be supplied");
    }
    if (blood_model && fit_blood) invalid("blood_model and fit_blood are mutually exclusive");
}

std::vector<SubjectEntry> read_listing(const std::filesystem::path& path) {
    const CsvTable table = CsvTable::parse(read_text_file(path));
    if (!table.has_column("subject_id") || !table.has_column("image")) {
        throw Error(ErrorCode::FormatError, path.string() + ": listing needs subject_id and image columns");
    }
    const auto base = path.parent_path();
    std::vector<SubjectEntry> out;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        SubjectEntry e;
        e.id = table.cell(r, "subject_id");
        if (e.id.empty()) throw Error(ErrorCode::FormatError, path.string() + ": empty subject_id");
        e.image = resolve(base, table.cell(r, "image"));
        if (const auto& s = table.cell(r, "samples"); !s.empty()) e.samples = resolve(base, s);
        if (const auto& g = table.cell(r, "group"); !g.empty()) e.group = g;
        out.push_back(std::move(e));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i].id == out[i - 1].id) {
            throw Error(ErrorCode::FormatError, path.string() + ": duplicate subject_id " + out[i].id);
        }
    }
    return out;
}

int effective_threads(int requested) {
    int n = std::max(1, requested);
    if (const char* env = std::getenv("T1FORGE_THREADS"); env && *env) {
        int cap = 0;
        const std::string_view s(env);
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), cap);
        if (ec == std::errc() && p == s.data() + s.size() && cap >= 1) n = std::min(n, cap);
    }
    return n;
}

}  // namespace t1forge::cli
