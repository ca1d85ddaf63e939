#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hpfilt/filters.hpp"
#include "hpfilt/sohp.hpp"

namespace hpfilt {

/// One observation: a value and, when the source file carries one, its
/// ISO-8601 calendar date.
struct SeriesRecord {
    std::optional<std::string> date;
    double value = 0.0;
};

enum class OutputFormat { Csv, Json };

namespace detail {

// RFC 4180 field splitting: quoted fields may contain commas, doubled
// quotes, and newlines. CRLF and LF line ends both accepted.
inline std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = std::move(buf).str();
    if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0)
        text.erase(0, 3);

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool row_open = false;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        if (!(row.size() == 1 && row.front().empty()))
            rows.push_back(std::move(row));
        row.clear();
        row_open = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (field.empty())
                quoted = true;
            else
                field += c;
            break;
        case ',':
            end_field();
            row_open = true;
            break;
        case '\r':
            break;
        case '\n':
            end_row();
            break;
        default:
            field += c;
            row_open = true;
        }
    }
    if (row_open || !field.empty() || !row.empty())
        end_row();
    return rows;
}

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos)
        return {};
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

inline double parse_value(const std::string& raw, std::size_t row) {
    const std::string s = trim(raw);
    if (s.empty() || s == "null" || s == "NULL" || s == "Null")
        throw ParseError("data row " + std::to_string(row) +
                             ": blank or null value",
                         row);
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+')
        ++first;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw ParseError("data row " + std::to_string(row) +
                             ": non-numeric value '" + s + "'",
                         row);
    if (!std::isfinite(value))
        throw ParseError("data row " + std::to_string(row) +
                             ": value is not finite",
                         row);
    return value;
}

inline std::string parse_iso_date(const std::string& raw, std::size_t row) {
    const std::string s = trim(raw);
    auto fail = [&] {
        throw ParseError("data row " + std::to_string(row) +
                             ": expected ISO-8601 date (YYYY-MM-DD), got '" +
                             s + "'",
                         row);
    };
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
        fail();
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (s[i] < '0' || s[i] > '9')
            fail();
    const int month = (s[5] - '0') * 10 + (s[6] - '0');
    const int day = (s[8] - '0') * 10 + (s[9] - '0');
    if (month < 1 || month > 12 || day < 1 || day > 31)
        fail();
    return s;
}

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v) {
    std::array<char, 32> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

}  // namespace detail

/// Reads a header-bearing CSV. `value_column` must exist; when
/// `date_column` is given, its dates must be ISO-8601 and strictly
/// increasing. Blank, "null", or non-numeric values are rejected with the
/// offending 1-based data row.
inline std::vector<SeriesRecord> read_csv(
    std::istream& in, const std::string& value_column,
    const std::optional<std::string>& date_column = std::nullopt) {
    const auto rows = detail::parse_csv(in);
    if (rows.empty())
        throw ParseError("empty input: no header row", 0);

    const std::vector<std::string>& header = rows.front();
    auto column_index = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (detail::trim(header[i]) == name)
                return i;
        throw SchemaError("column '" + name + "' not found in header");
    };
    const std::size_t value_idx = column_index(value_column);
    std::optional<std::size_t> date_idx;
    if (date_column)
        date_idx = column_index(*date_column);

    std::vector<SeriesRecord> records;
    records.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const std::vector<std::string>& row = rows[r];
        if (row.size() != header.size())
            throw ParseError("data row " + std::to_string(r) + ": has " +
                                 std::to_string(row.size()) +
                                 " fields, header has " +
                                 std::to_string(header.size()),
                             r);
        SeriesRecord rec;
        rec.value = detail::parse_value(row[value_idx], r);
        if (date_idx) {
            rec.date = detail::parse_iso_date(row[*date_idx], r);
            if (records.size() > 0 && records.back().date &&
                !(*records.back().date < *rec.date))
                throw OrderingError("data row " + std::to_string(r) +
                                    ": date " + *rec.date +
                                    " does not increase past " +
                                    *records.back().date);
        }
        records.push_back(std::move(rec));
    }
    if (records.empty())
        throw ParseError("no data rows after the header", 0);
    return records;
}

inline std::vector<SeriesRecord> read_csv(
    const std::filesystem::path& path, const std::string& value_column,
    const std::optional<std::string>& date_column = std::nullopt) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "' for reading");
    return read_csv(in, value_column, date_column);
}

inline Vector values(const std::vector<SeriesRecord>& records) {
    Vector y(static_cast<Index>(records.size()));
    for (std::size_t i = 0; i < records.size(); ++i)
        y[static_cast<Index>(i)] = records[i].value;
    return y;
}

inline std::vector<std::string> dates(const std::vector<SeriesRecord>& records) {
    std::vector<std::string> out;
    if (records.empty() || !records.front().date)
        return out;
    out.reserve(records.size());
    for (const SeriesRecord& r : records)
        out.push_back(r.date.value_or(""));
    return out;
}

/// Elementwise natural log; every value must be positive.
inline Vector log_transform(const Vector& y) {
    Vector out(y.size());
    for (Index i = 0; i < y.size(); ++i) {
        if (!(y[i] > 0.0))
            throw DomainError("log transform needs positive values; index " +
                                  std::to_string(i) + " is " +
                                  detail::format_double(y[i]),
                              static_cast<std::size_t>(i));
        out[i] = std::log(y[i]);
    }
    return out;
}

inline Vector log_transform(const std::vector<SeriesRecord>& records) {
    return log_transform(values(records));
}

namespace detail {

inline void write_csv_table(std::ostream& out, const Vector& y,
                            const Vector& trend, const Vector& cycle,
                            const std::vector<Vector>* stages,
                            const std::vector<std::string>& dates) {
    const Index l = y.size();
    if (!dates.empty() && static_cast<Index>(dates.size()) != l)
        throw DimensionError("date list does not match the series length");

    out << 't';
    if (!dates.empty()) out << ",date";
    out << ",y,trend,cycle";
    if (stages)
        for (std::size_t s = 0; s < stages->size(); ++s)
            out << ",stage_trend_" << (s + 1);
    out << '\n';

    for (Index i = 0; i < l; ++i) {
        out << (i + 1);
        if (!dates.empty()) out << ',' << dates[static_cast<std::size_t>(i)];
        out << ',' << format_double(y[i]) << ',' << format_double(trend[i])
            << ',' << format_double(cycle[i]);
        if (stages)
            for (const Vector& g : *stages)
                out << ',' << format_double(g[i]);
        out << '\n';
    }
    if (!out)
        throw IoError("write failed");
}

inline nlohmann::json json_array(const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace detail

inline void write_decomposition(const Decomposition& dec, OutputFormat format,
                                std::ostream& out,
                                const std::vector<std::string>& dates = {}) {
    if (format == OutputFormat::Csv) {
        detail::write_csv_table(out, dec.observations, dec.trend, dec.cycle,
                                nullptr, dates);
        return;
    }
    nlohmann::json j;
    j["length"] = dec.observations.size();
    if (!dates.empty()) j["dates"] = dates;
    j["y"] = detail::json_array(dec.observations);
    j["trend"] = detail::json_array(dec.trend);
    j["cycle"] = detail::json_array(dec.cycle);
    out << j.dump(2) << '\n';
    if (!out)
        throw IoError("write failed");
}

inline void write_decomposition(const SohpResult& res, OutputFormat format,
                                std::ostream& out,
                                const std::vector<std::string>& dates = {}) {
    if (format == OutputFormat::Csv) {
        detail::write_csv_table(out, res.observations, res.cumulative_trend,
                                res.final_cycle, &res.stage_trends, dates);
        return;
    }
    nlohmann::json j;
    j["length"] = res.observations.size();
    if (!dates.empty()) j["dates"] = dates;
    j["y"] = detail::json_array(res.observations);
    j["trend"] = detail::json_array(res.cumulative_trend);
    j["cycle"] = detail::json_array(res.final_cycle);
    nlohmann::json stages = nlohmann::json::array();
    for (const Vector& g : res.stage_trends)
        stages.push_back(detail::json_array(g));
    j["stage_trends"] = std::move(stages);
    j["chosen_n"] = res.chosen_n;
    j["si_values"] = res.si_values;
    j["degenerate"] = res.degenerate;
    out << j.dump(2) << '\n';
    if (!out)
        throw IoError("write failed");
}

template <typename Result>
inline void write_decomposition(const Result& res, OutputFormat format,
                                const std::filesystem::path& path,
                                const std::vector<std::string>& dates = {}) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    write_decomposition(res, format, out, dates);
    out.flush();
    if (!out)
        throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace hpfilt
