#include "distsec/encoders.hpp"

#include "distsec/error.hpp"

#include <string>

namespace distsec {

namespace {

constexpr std::size_t none = static_cast<std::size_t>(-1);

std::size_t free_color(const std::vector<std::size_t>& slots, std::size_t vertex, std::size_t colors)
{
    for (std::size_t c = 0; c < colors; ++c)
        if (slots[vertex * colors + c] == none)
            return c;
    return none;
}

} // namespace

// Konig's edge colouring: give edge (u, v) a colour a free at u; if a is taken at v,
// flip the a/b alternating path from v (b free at v). Bipartiteness keeps u off that path.
std::vector<std::size_t> bipartite_edge_coloring(std::size_t left_count, std::size_t right_count,
                                                 const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                                 std::size_t colors)
{
    // at_left[u*colors+c] / at_right[v*colors+c] hold the edge id using colour c, or none.
    std::vector<std::size_t> at_left(left_count * colors, none);
    std::vector<std::size_t> at_right(right_count * colors, none);
    std::vector<std::size_t> color(edges.size(), none);

    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [u, v] = edges[e];
        if (u >= left_count || v >= right_count)
            throw InputError("edge colouring: vertex out of range");
        const std::size_t a = free_color(at_left, u, colors);
        const std::size_t b = free_color(at_right, v, colors);
        if (a == none || b == none)
            throw InputError("edge colouring: vertex degree exceeds " + std::to_string(colors));

        if (at_right[v * colors + a] != none) {
            // Collect the path v -a- u1 -b- v1 -a- ... then swap a and b along it.
            std::vector<std::size_t> path;
            bool on_right = true;
            std::size_t vertex = v;
            std::size_t want = a;
            for (;;) {
                const std::size_t edge = on_right ? at_right[vertex * colors + want] : at_left[vertex * colors + want];
                if (edge == none)
                    break;
                path.push_back(edge);
                vertex = on_right ? edges[edge].first : edges[edge].second;
                on_right = !on_right;
                want = want == a ? b : a;
            }
            for (auto edge : path) {
                const auto [pu, pv] = edges[edge];
                at_left[pu * colors + color[edge]] = none;
                at_right[pv * colors + color[edge]] = none;
            }
            for (auto edge : path) {
                const auto [pu, pv] = edges[edge];
                color[edge] = color[edge] == a ? b : a;
                at_left[pu * colors + color[edge]] = edge;
                at_right[pv * colors + color[edge]] = edge;
            }
        }
        color[e] = a;
        at_left[u * colors + a] = e;
        at_right[v * colors + a] = e;
    }
    return color;
}

KeyedCode complete_key_assignment(const Binning& binning)
{
    binning.validate();
    const std::size_t keys = binning.copies();
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    edges.reserve(binning.m * keys);
    // value-major edge order, so the colouring is deterministic
    for (std::size_t value = 0; value < binning.m; ++value)
        for (std::size_t j = 0; j < binning.r(); ++j)
            for (auto x : binning.bins[j])
                if (x == value)
                    edges.emplace_back(value, j);

    const auto colors = bipartite_edge_coloring(binning.m, binning.r(), edges, keys);
    std::vector<std::vector<std::size_t>> assignment(keys, std::vector<std::size_t>(binning.m));
    for (std::size_t e = 0; e < edges.size(); ++e)
        assignment[colors[e]][edges[e].first] = edges[e].second;
    return KeyedCode(binning.m, binning.k, binning.r(), assignment);
}

} // namespace distsec
