#pragma once

#include "pctladp/error.hpp"
#include "pctladp/version.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace pctladp::io {

/// Shortest decimal that round-trips; "nan", "inf", "-inf" for non-finite values.
inline std::string format_double(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    if (x == 0.0)
        return "0";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

    /// Starts a new row; fill it with add().
    CsvTable& row()
    {
        rows_.emplace_back();
        return *this;
    }
    CsvTable& add(double x) { return add(format_double(x)); }
    CsvTable& add(int x) { return add(std::to_string(x)); }
    CsvTable& add(long x) { return add(std::to_string(x)); }
    CsvTable& add(const char* s) { return add(std::string(s)); }
    CsvTable& add(std::string s)
    {
        if (rows_.empty())
            throw StructuralError("CsvTable::add before row()");
        rows_.back().push_back(quote(std::move(s)));
        return *this;
    }

    std::string str() const
    {
        std::string out;
        auto line = [&out](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i)
                    out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        std::vector<std::string> head;
        for (const auto& h : header_)
            head.push_back(quote(h));
        line(head);
        for (const auto& r : rows_) {
            if (r.size() != header_.size())
                throw StructuralError("CSV row has " + std::to_string(r.size()) + " cells, header has " +
                                      std::to_string(header_.size()));
            line(r);
        }
        return out;
    }

private:
    static std::string quote(std::string s)
    {
        if (s.find_first_of(",\"\n") == std::string::npos)
            return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"')
                q += '"';
            q += c;
        }
        return q + '"';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// 64-bit FNV-1a, used as the config hash in metadata sidecars.
inline std::uint64_t fnv1a(const std::string& bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t x)
{
    char buf[17];
    auto [end, ec] = std::to_chars(buf, buf + 16, x, 16);
    std::string s(buf, end);
    return std::string(16 - s.size(), '0') + s;
}

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot open '" + path + "' for writing");
    out << text;
    if (!out)
        throw InputError("write to '" + path + "' failed");
}

/// Sidecar contents: hash of the canonical config dump, the seed, and library versions.
inline nlohmann::json metadata(const nlohmann::json& config, std::uint64_t seed)
{
    nlohmann::json m;
    m["config_hash"] = hex64(fnv1a(config.dump()));
    m["seed"] = seed;
    m["version"] = version;
    m["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    m["config"] = config;
    return m;
}

/// Writes `path` and `path.meta.json`.
inline void write_csv(const std::string& path, const CsvTable& table, const nlohmann::json& config, std::uint64_t seed)
{
    write_text(path, table.str());
    write_text(path + ".meta.json", metadata(config, seed).dump(2) + "\n");
}

}  // namespace pctladp::io
