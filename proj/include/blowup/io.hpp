#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "blowup/graph.hpp"

namespace blowup {

// Plain-text formats. One file per graph:
//   graph <n>        followed by `e u v` lines
//   host <r> <N>     followed by `e u v` lines with global ids
//   pattern files    are graph files plus one `psi v c` line per vertex
//   map files        hold one `map x v` line per pattern vertex
// `#` starts a comment. Writers emit edges sorted lexicographically so
// identical inputs produce byte-identical files.

void write_graph(std::ostream& out, const SimpleGraph& g);
void write_host(std::ostream& out, const PartitionedHost& host);
void write_pattern(std::ostream& out, const Pattern& pattern);
void write_map(std::ostream& out, const std::vector<std::int64_t>& image);

SimpleGraph read_graph(std::istream& in);
PartitionedHost read_host(std::istream& in);
Pattern read_pattern(std::istream& in, const ClusterGraph& reduced);
std::vector<std::int64_t> read_map(std::istream& in, std::size_t pattern_vertices);

void save_text(const std::string& path, const std::string& contents);
std::string graph_text(const SimpleGraph& g);
std::string host_text(const PartitionedHost& host);
std::string pattern_text(const Pattern& pattern);

SimpleGraph load_graph(const std::string& path);
PartitionedHost load_host(const std::string& path);
Pattern load_pattern(const std::string& path, const ClusterGraph& reduced);
std::vector<std::int64_t> load_map(const std::string& path, std::size_t pattern_vertices);

} // namespace blowup
