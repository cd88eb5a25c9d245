#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "denat/syntax.hpp"

namespace denat::dataflow {

enum class OccRole { Def, Use, Update };

struct VarOccurrence {
    std::string name;
    NodeId node = kNoNode;  // the Identifier node
    OccRole role = OccRole::Use;
    uint32_t scope = 0;
    uint32_t chain = 0;  // declaration chain, numbered by first occurrence
};

struct Scope {
    uint32_t id = 0;
    uint32_t parent = 0;  // == id for the root scope
};

/// Edge from a def/update occurrence to a use it may reach.
struct Edge {
    uint32_t from = 0;  // index into occurrences
    uint32_t to = 0;
    auto operator<=>(const Edge&) const = default;
};

struct DefUseGraph {
    std::vector<VarOccurrence> occurrences;  // source order
    std::vector<Edge> edges;                 // sorted, deduplicated
    std::vector<Scope> scopes;

    struct Chain {
        std::string name;
        TypeKind type = TypeKind::None;
        uint32_t defOcc = 0;  // index of the declaring occurrence
        bool isParam = false;
        NodeId function = kNoNode;
    };
    std::vector<Chain> chains;  // index == chain id, ordered by first occurrence
};

struct DataflowError : std::runtime_error {
    DataflowError(std::string msg, Span span)
        : std::runtime_error(std::move(msg)), span(span) {}
    Span span;
};

struct UnresolvedVariable : DataflowError {
    UnresolvedVariable(std::string name, Span span)
        : DataflowError("unresolved variable '" + name + "'", span), name(std::move(name)) {}
    std::string name;
};

struct DuplicateDeclaration : DataflowError {
    DuplicateDeclaration(std::string name, Span span)
        : DataflowError("duplicate declaration of '" + name + "'", span), name(std::move(name)) {}
    std::string name;
};

struct UnknownName : std::runtime_error {
    explicit UnknownName(std::string name)
        : std::runtime_error("name '" + name + "' is never declared"), name(std::move(name)) {}
    std::string name;
};

/// Reaching-definitions approximation: flow-insensitive except for lexical
/// scoping and statement order; loop bodies may execute zero or more times.
DefUseGraph buildDefUse(const Ast& ast);

/// Every occurrence of `name`, across all of its declaration chains (a
/// shadowed inner variable is a distinct chain; see VarOccurrence::chain).
std::vector<VarOccurrence> occurrencesOf(const DefUseGraph& graph, std::string_view name);

std::vector<uint32_t> chainsOf(const DefUseGraph& graph, std::string_view name);

/// Names referenced under `node` but not declared under it.
std::set<std::string> freeVars(const Ast& ast, NodeId node);

/// True iff the subtree contains no assignment, no ++/--, and no call.
bool isPure(const Ast& ast, NodeId node);

/// Def-use edges anonymized for the DM metric: (chain number in
/// first-occurrence order, role of the source occurrence), sorted.
std::vector<std::pair<uint32_t, int>> anonymizedEdges(const DefUseGraph& graph);

}  // namespace denat::dataflow
