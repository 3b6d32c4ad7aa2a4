#include "repgraph/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>

#include "repgraph/errors.hpp"

namespace repgraph {

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        std::string_view field = line.substr(start, comma == std::string_view::npos ? comma : comma - start);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
        while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
        out.push_back(field);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line, const char* what) {
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
        throw ParseError(std::string("malformed ") + what + " '" + std::string(field) + "'", line);
    return value;
}

Sample parse_label(std::string_view field, std::size_t line) {
    if (field == "1") return Sample::first;
    if (field == "2") return Sample::second;
    throw ParseError("sample label must be 1 or 2, got '" + std::string(field) + "'", line);
}

// Calls fn(line_number, fields) for each data line.
template <typename Fn>
void for_each_row(std::istream& in, Fn&& fn) {
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
        fn(number, split(line));
    }
}

}  // namespace

std::vector<Observation> read_observations(std::istream& in, PayloadKind kind) {
    std::vector<Observation> out;
    std::size_t nodes = 0;
    std::size_t width = 0;
    for_each_row(in, [&](std::size_t line, const std::vector<std::string_view>& f) {
        if (kind == PayloadKind::network && nodes == 0) {
            if (f.size() != 1 || f[0].substr(0, 6) != "nodes=")
                throw ParseError("network file must start with 'nodes=<n>'", line);
            nodes = parse_number<std::size_t>(f[0].substr(6), line, "node count");
            if (nodes == 0) throw ParseError("node count must be positive", line);
            return;
        }
        if (f.size() < 2) throw ParseError("expected a label followed by at least one value", line);
        if (width == 0) width = f.size();
        if (f.size() != width)
            throw ParseError("row has " + std::to_string(f.size() - 1) + " values, earlier rows have " +
                                 std::to_string(width - 1),
                             line);
        Observation obs;
        obs.label = parse_label(f[0], line);
        switch (kind) {
            case PayloadKind::vector: {
                RealVector v;
                for (std::size_t i = 1; i < f.size(); ++i) {
                    const double x = parse_number<double>(f[i], line, "number");
                    if (!std::isfinite(x)) throw ParseError("non-finite value", line);
                    v.push_back(x);
                }
                obs.payload = std::move(v);
                break;
            }
            case PayloadKind::ranking: {
                Ranking r;
                for (std::size_t i = 1; i < f.size(); ++i) r.push_back(parse_number<int>(f[i], line, "rank entry"));
                try {
                    validate_ranking(r);
                } catch (const Error& e) {
                    throw ParseError(e.what(), line);
                }
                obs.payload = std::move(r);
                break;
            }
            case PayloadKind::network: {
                if (f.size() - 1 != nodes * nodes)
                    throw ParseError("network row needs " + std::to_string(nodes * nodes) + " cells", line);
                AdjacencyMatrix a{nodes, {}};
                for (std::size_t i = 1; i < f.size(); ++i) {
                    if (f[i] != "0" && f[i] != "1") throw ParseError("adjacency cells must be 0 or 1", line);
                    a.cells.push_back(f[i] == "1");
                }
                obs.payload = std::move(a);
                break;
            }
        }
        out.push_back(std::move(obs));
    });
    if (kind == PayloadKind::network && nodes == 0) throw ParseError("missing 'nodes=<n>' header", 0);
    if (out.empty()) throw ParseError("no observations in input", 0);
    return out;
}

void write_observations(std::ostream& out, const std::vector<Observation>& observations) {
    if (!observations.empty())
        if (const auto* a = std::get_if<AdjacencyMatrix>(&observations.front().payload))
            out << "nodes=" << a->nodes << '\n';
    out.precision(std::numeric_limits<double>::max_digits10);
    for (const auto& obs : observations) {
        out << static_cast<int>(obs.label);
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, AdjacencyMatrix>) {
                    for (auto c : p.cells) out << ',' << static_cast<int>(c);
                } else {
                    for (auto x : p) out << ',' << x;
                }
            },
            obs.payload);
        out << '\n';
    }
}

DistanceMatrix read_distance_matrix(std::istream& in, double tie_tolerance) {
    std::vector<double> values;
    std::size_t k = 0, rows = 0;
    for_each_row(in, [&](std::size_t line, const std::vector<std::string_view>& f) {
        if (k == 0) k = f.size();
        if (f.size() != k)
            throw ParseError("row has " + std::to_string(f.size()) + " entries, expected " + std::to_string(k), line);
        for (auto field : f) values.push_back(parse_number<double>(field, line, "distance"));
        ++rows;
    });
    if (rows == 0) throw ParseError("empty distance matrix", 0);
    if (rows != k)
        throw ParseError("distance matrix has " + std::to_string(rows) + " rows and " + std::to_string(k) + " columns",
                         0);
    return DistanceMatrix(k, std::move(values), tie_tolerance);
}

void write_distance_matrix(std::ostream& out, const DistanceMatrix& d) {
    out.precision(std::numeric_limits<double>::max_digits10);
    for (std::size_t u = 0; u < d.size(); ++u) {
        for (std::size_t v = 0; v < d.size(); ++v) out << (v ? "," : "") << d(u, v);
        out << '\n';
    }
}

DistinctTable read_sidecar(std::istream& in, std::size_t k) {
    std::vector<std::size_t> value_of;
    std::vector<Sample> labels;
    for_each_row(in, [&](std::size_t line, const std::vector<std::string_view>& f) {
        if (f.size() != 2) throw ParseError("expected 'label,value_index'", line);
        labels.push_back(parse_label(f[0], line));
        const auto idx = parse_number<std::size_t>(f[1], line, "value index");
        if (idx < 1 || idx > k) throw ParseError("value index outside 1.." + std::to_string(k), line);
        value_of.push_back(idx - 1);
    });
    if (labels.empty()) throw ParseError("empty sidecar file", 0);
    try {
        return DistinctTable::from_mapping(k, value_of, labels);
    } catch (const DomainError& e) {
        throw ParseError(e.what(), 0);
    }
}

void write_distinct_table(std::ostream& out, const DistinctTable& table) {
    out << "value,n1,n2,m\n";
    for (std::size_t u = 0; u < table.size(); ++u)
        out << u + 1 << ',' << table.n1u()[u] << ',' << table.n2u()[u] << ',' << table.multiplicity(u) << '\n';
}

}  // namespace repgraph
