#include "blowup/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace blowup {

namespace {

// Strips comments, returns the next meaningful line split into tokens.
bool next_tokens(std::istream& in, std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        tokens.clear();
        std::string tok;
        while (ss >> tok) tokens.push_back(tok);
        if (!tokens.empty()) return true;
    }
    return false;
}

std::size_t parse_index(const std::string& tok) {
    std::size_t pos = 0;
    unsigned long long v = std::stoull(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("graph file: bad integer '" + tok + "'");
    return static_cast<std::size_t>(v);
}

[[noreturn]] void bad_line(const std::string& what) {
    throw std::invalid_argument("graph file: unexpected line near '" + what + "'");
}

} // namespace

void write_graph(std::ostream& out, const SimpleGraph& g) {
    out << "graph " << g.vertex_count() << "\n";
    for (auto [u, v] : g.edges()) out << "e " << u << " " << v << "\n";
}

void write_host(std::ostream& out, const PartitionedHost& host) {
    out << "host " << host.cluster_count() << " " << host.class_size() << "\n";
    std::vector<std::pair<std::size_t, std::size_t>> all;
    all.reserve(host.edge_count());
    for (auto [i, j] : host.reduced().edges()) {
        for (std::size_t off = 0; off < host.class_size(); ++off) {
            std::size_t u = host.global(i, off);
            host.adjacency_row(i, off, j).for_each([&](std::size_t off_j) {
                std::size_t v = host.global(j, off_j);
                all.emplace_back(std::min(u, v), std::max(u, v));
            });
        }
    }
    std::sort(all.begin(), all.end());
    for (auto [u, v] : all) out << "e " << u << " " << v << "\n";
}

void write_pattern(std::ostream& out, const Pattern& pattern) {
    write_graph(out, pattern.graph());
    for (std::size_t x = 0; x < pattern.graph().vertex_count(); ++x)
        out << "psi " << x << " " << pattern.cluster_of(x) << "\n";
}

void write_map(std::ostream& out, const std::vector<std::int64_t>& image) {
    for (std::size_t x = 0; x < image.size(); ++x) out << "map " << x << " " << image[x] << "\n";
}

SimpleGraph read_graph(std::istream& in) {
    std::vector<std::string> tok;
    if (!next_tokens(in, tok) || tok[0] != "graph" || tok.size() != 2) bad_line("expected 'graph <n>' header");
    SimpleGraph g(parse_index(tok[1]));
    while (next_tokens(in, tok)) {
        if (tok[0] == "e" && tok.size() == 3)
            g.add_edge(parse_index(tok[1]), parse_index(tok[2]));
        else if (tok[0] == "psi")
            continue; // pattern payload, handled by read_pattern
        else
            bad_line(tok[0]);
    }
    return g;
}

PartitionedHost read_host(std::istream& in) {
    std::vector<std::string> tok;
    if (!next_tokens(in, tok) || tok[0] != "host" || tok.size() != 3) bad_line("expected 'host <r> <N>' header");
    const std::size_t r = parse_index(tok[1]);
    const std::size_t class_size = parse_index(tok[2]);
    if (class_size == 0) throw std::invalid_argument("graph file: host class size must be positive");

    std::vector<std::pair<std::size_t, std::size_t>> raw_edges;
    std::set<std::pair<std::size_t, std::size_t>> cluster_pairs;
    while (next_tokens(in, tok)) {
        if (tok[0] != "e" || tok.size() != 3) bad_line(tok[0]);
        std::size_t u = parse_index(tok[1]), v = parse_index(tok[2]);
        if (u >= r * class_size || v >= r * class_size) throw std::invalid_argument("graph file: host vertex out of range");
        std::size_t i = u / class_size, j = v / class_size;
        if (i == j) throw std::invalid_argument("graph file: host edge inside a class");
        cluster_pairs.insert({std::min(i, j), std::max(i, j)});
        raw_edges.emplace_back(u, v);
    }

    // The reduced graph is recovered from the cluster pairs the edges touch.
    ClusterGraph reduced(r);
    for (auto [i, j] : cluster_pairs) reduced.add_edge(i, j);
    PartitionedHost host(std::move(reduced), class_size);
    for (auto [u, v] : raw_edges)
        host.add_pair_edge(u / class_size, u % class_size, v / class_size, v % class_size);
    return host;
}

Pattern read_pattern(std::istream& in, const ClusterGraph& reduced) {
    std::vector<std::string> tok;
    if (!next_tokens(in, tok) || tok[0] != "graph" || tok.size() != 2) bad_line("expected 'graph <n>' header");
    const std::size_t n = parse_index(tok[1]);
    SimpleGraph g(n);
    std::vector<std::size_t> psi(n, Bitset::npos);
    while (next_tokens(in, tok)) {
        if (tok[0] == "e" && tok.size() == 3) {
            g.add_edge(parse_index(tok[1]), parse_index(tok[2]));
        } else if (tok[0] == "psi" && tok.size() == 3) {
            std::size_t x = parse_index(tok[1]);
            if (x >= n) throw std::invalid_argument("graph file: psi vertex out of range");
            psi[x] = parse_index(tok[2]);
        } else {
            bad_line(tok[0]);
        }
    }
    for (std::size_t x = 0; x < n; ++x)
        if (psi[x] == Bitset::npos) throw std::invalid_argument("graph file: missing psi line for vertex " + std::to_string(x));
    return Pattern(std::move(g), std::move(psi), reduced);
}

std::vector<std::int64_t> read_map(std::istream& in, std::size_t pattern_vertices) {
    std::vector<std::int64_t> image(pattern_vertices, -1);
    std::vector<std::string> tok;
    while (next_tokens(in, tok)) {
        if (tok[0] != "map" || tok.size() != 3) bad_line(tok[0]);
        std::size_t x = parse_index(tok[1]);
        if (x >= pattern_vertices) throw std::invalid_argument("map file: pattern vertex out of range");
        image[x] = static_cast<std::int64_t>(parse_index(tok[2]));
    }
    return image;
}

void save_text(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << contents;
}

std::string graph_text(const SimpleGraph& g) {
    std::ostringstream ss;
    write_graph(ss, g);
    return ss.str();
}

std::string host_text(const PartitionedHost& host) {
    std::ostringstream ss;
    write_host(ss, host);
    return ss.str();
}

std::string pattern_text(const Pattern& pattern) {
    std::ostringstream ss;
    write_pattern(ss, pattern);
    return ss.str();
}

namespace {
std::ifstream open_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return in;
}
} // namespace

SimpleGraph load_graph(const std::string& path) {
    auto in = open_file(path);
    return read_graph(in);
}

PartitionedHost load_host(const std::string& path) {
    auto in = open_file(path);
    return read_host(in);
}

Pattern load_pattern(const std::string& path, const ClusterGraph& reduced) {
    auto in = open_file(path);
    return read_pattern(in, reduced);
}

std::vector<std::int64_t> load_map(const std::string& path, std::size_t pattern_vertices) {
    auto in = open_file(path);
    return read_map(in, pattern_vertices);
}

} // namespace blowup
