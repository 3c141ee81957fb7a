#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "holobrace/brace.hpp"
#include "holobrace/lifting.hpp"
#include "holobrace/oracle.hpp"
#include "holobrace/shard.hpp"

namespace py = pybind11;
using namespace holobrace;

namespace {

LiftContext build_ctx(const std::string& desc) {
  return LiftContext::build(group_from_descriptor(desc), std::nullopt, EngineOptions::from_env());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Conjugacy classes of regular subgroups of Hol(G) for finite abelian G, "
            "and the left braces they define";

  m.def("group_order", [](const std::string& desc) { return group_from_descriptor(desc).order; },
        py::arg("group"), "Order of the abelian group given by a descriptor such as \"2,2,4,4\".");
  m.def("aut_order", [](const std::string& desc) { return aut_order_formula(group_from_descriptor(desc)); },
        py::arg("group"), "Order of Aut(G) from the closed-form formula.");
  m.def("hol_order",
        [](const std::string& desc) {
          AbelianGroup g = group_from_descriptor(desc);
          return static_cast<unsigned long long>(g.order) * aut_order_formula(g);
        },
        py::arg("group"), "Order of the holomorph G x| Aut(G).");

  m.def("regular_class_count",
        [](const std::string& desc) {
          LiftContext ctx = build_ctx(desc);
          return run_layers(ctx).classes.size();
        },
        py::arg("group"),
        "Number of conjugacy classes of regular subgroups of Hol(G) via the layered lifting "
        "enumeration (= number of left braces with additive group G).");

  m.def("oracle_class_count",
        [](const std::string& desc) { return oracle_regular_classes(group_from_descriptor(desc)); },
        py::arg("group"),
        "Independent class count by cyclic-extension subgroup enumeration (|Hol(G)| <= 5000).");

  m.def("layer_stats",
        [](const std::string& desc) {
          LiftContext ctx = build_ctx(desc);
          RunResult res = run_layers(ctx);
          std::vector<std::pair<size_t, size_t>> out;
          for (const auto& st : res.stats)
            if (st.layer > 0) out.push_back({st.layer, st.classes});
          return out;
        },
        py::arg("group"), "Per-layer class counts of the lifting run, as (layer, classes) pairs.");

  m.def("braces",
        [](const std::string& desc) {
          LiftContext ctx = build_ctx(desc);
          RunResult res = run_layers(ctx);
          py::list out;
          for (const SubgroupRecord& rec : res.classes) {
            Brace b = brace_from_regular(ctx, rec);
            py::dict d;
            d["origin"] = encode_record(ctx.pcgs, rec);
            py::list table;
            for (const auto& row : b.mul) table.append(std::vector<unsigned>(row.begin(), row.end()));
            d["mul_table"] = table;
            d["fingerprint"] = fingerprint_string(fingerprint(b));
            out.append(d);
          }
          return out;
        },
        py::arg("group"),
        "All left braces with additive group G: multiplicative Cayley tables over the element "
        "indices, with the origin subgroup key and a multiplicative-group fingerprint.");

  m.def("verify_brace_table",
        [](const std::string& desc, const std::vector<std::vector<unsigned>>& mul_table) {
          AbelianGroup g = group_from_descriptor(desc);
          Brace b;
          b.group = g;
          b.add.assign(g.order, std::vector<uint8_t>(g.order));
          for (unsigned x = 0; x < g.order; ++x)
            for (unsigned y = 0; y < g.order; ++y)
              b.add[x][y] = static_cast<uint8_t>(
                  elem_index(g, elem_add(g, index_elem(g, x), index_elem(g, y))));
          if (mul_table.size() != g.order) return false;
          b.mul.assign(g.order, std::vector<uint8_t>(g.order));
          for (unsigned x = 0; x < g.order; ++x) {
            if (mul_table[x].size() != g.order) return false;
            for (unsigned y = 0; y < g.order; ++y) {
              if (mul_table[x][y] >= g.order) return false;
              b.mul[x][y] = static_cast<uint8_t>(mul_table[x][y]);
            }
          }
          return verify_brace(b);
        },
        py::arg("group"), py::arg("mul_table"),
        "Exhaustively checks the brace axioms of a multiplicative table over the additive group.");
}
