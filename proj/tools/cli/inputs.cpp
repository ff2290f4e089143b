#include "inputs.hpp"

#include <pobounds/errors.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pobounds::cli {

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string_view rest = line;
    while (true) {
        const auto comma = rest.find(',');
        out.push_back(trim(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

int parse_field(const std::string& text, const std::string& where) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
        throw ParseError(where + ": expected an integer, got '" + text + "'");
    return value;
}

// Calls emit(a, b, row) for each record of a two-column CSV with the given
// header.
template <class Emit>
void read_pairs(const std::string& text, const std::string& first, const std::string& second, Emit emit) {
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    int row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (!header_seen) {
            header_seen = true;
            if (fields.size() != 2 || fields[0] != first || fields[1] != second) {
                for (const auto& f : fields)
                    if (f != first && f != second) throw ParseError("header: unknown column '" + f + "'");
                throw ParseError("header: expected '" + first + "," + second + "'");
            }
            continue;
        }
        ++row;
        const std::string where = "row " + std::to_string(row);
        if (fields.size() != 2) throw ParseError(where + ": expected 2 fields, got " + std::to_string(fields.size()));
        emit(parse_field(fields[0], where + " column " + first), parse_field(fields[1], where + " column " + second), where);
    }
    if (!header_seen) throw ParseError("empty CSV: expected header '" + first + "," + second + "'");
}

bool looks_like_json(const std::string& path, const std::string& text) {
    if (std::filesystem::path(path).extension() == ".json") return true;
    const auto pos = text.find_first_not_of(" \t\r\n");
    return pos != std::string::npos && (text[pos] == '{' || text[pos] == '[');
}

Json parse_json_text(const std::string& text, const std::string& where) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(where + ": malformed JSON (" + e.what() + ")");
    }
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

Json read_json_file(const std::string& path) { return parse_json_text(read_file(path), path); }

ExperimentalSample parse_experimental_csv(const std::string& text, const Dims& dims) {
    ExperimentalSample sample{dims, std::vector<std::vector<int>>(static_cast<std::size_t>(dims.d_x()))};
    read_pairs(text, "arm", "y", [&](int arm, int y, const std::string& where) {
        if (arm < 0 || arm >= dims.d_x()) throw ParseError(where + ": arm " + std::to_string(arm) + " out of range");
        if (y < 0 || y >= dims.d_y()) throw ParseError(where + ": y " + std::to_string(y) + " out of range");
        sample.arms[static_cast<std::size_t>(arm)].push_back(y);
    });
    return sample;
}

ObservationalSample parse_observational_csv(const std::string& text, const Dims& dims) {
    ObservationalSample sample{dims, {}};
    read_pairs(text, "x", "y", [&](int x, int y, const std::string& where) {
        if (x < 0 || x >= dims.d_x()) throw ParseError(where + ": x " + std::to_string(x) + " out of range");
        if (y < 0 || y >= dims.d_y()) throw ParseError(where + ": y " + std::to_string(y) + " out of range");
        sample.records.push_back({x, y});
    });
    return sample;
}

ExperimentalInput load_experimental(const std::string& path, const Dims& dims) {
    const std::string text = read_file(path);
    if (looks_like_json(path, text)) return {parse_experimental(parse_json_text(text, path), dims), std::nullopt};
    try {
        auto sample = parse_experimental_csv(text, dims);
        return {empirical_experimental(sample), std::move(sample)};
    } catch (const Error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

ObservationalInput load_observational(const std::string& path, const Dims& dims) {
    const std::string text = read_file(path);
    if (looks_like_json(path, text)) return {parse_observational(parse_json_text(text, path), dims), std::nullopt};
    try {
        auto sample = parse_observational_csv(text, dims);
        return {empirical_observational(sample), std::move(sample)};
    } catch (const Error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

Dims parse_dims_flag(const std::string& text) {
    const auto fields = split_fields(text);
    if (fields.size() != 2) throw ParseError("--dims: expected 'dX,dY', got '" + text + "'");
    return Dims(parse_field(fields[0], "--dims"), parse_field(fields[1], "--dims"));
}

Json load_assumption_spec(const std::string& text) {
    const std::string t = trim(text);
    if (!t.empty() && (t.front() == '{' || t.front() == '"')) return parse_json_text(t, "--assume");
    if (std::filesystem::is_regular_file(t)) return read_json_file(t);
    return Json(t);
}

Json load_query_spec(const std::string& text) {
    const std::string t = trim(text);
    if (!t.empty() && t.front() == '{') return parse_json_text(t, "--query");
    return read_json_file(t);
}

}  // namespace pobounds::cli
