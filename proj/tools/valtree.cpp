// valtree: command-line front end for the valuation-tree library.
//
// Subcommands parse node/family/chain JSON, run one operation, and print a
// human-readable answer or (with --json) a machine record whose JSON
// re-parses to the same in-memory object.  All numbers are exact rationals.
//
// Exit codes: 0 ok, 1 property violated (leq/equiv "no", invalid chain),
// 2 unusable input, 3 undecidable within the configured horizon.

#include <valtree/valtree.hpp>

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace valtree;

namespace {

struct RunConfig {
    std::string prime = "7";
    std::size_t rank = 3;
    std::size_t horizon = 24;
    bool json = false;

    GroundValuation gv() const { return GroundValuation(Int(prime), rank); }
};

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const std::exception& e) {
        throw input_error("cannot parse JSON in " + path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

NodePtr load_node(const std::string& path, const GroundValuation& gv) {
    return node_from_json(read_json_file(path), gv);
}

// A polynomial certifying that `a <= b` fails: some structural polynomial of
// either chain on which a exceeds b.  Candidates whose value does not
// stabilise are skipped.
std::optional<Json> refutation(const NodePtr& a, const NodePtr& b) {
    std::vector<Poly> cands;
    for (const NodePtr& side : {a, b})
        for (const NodePtr& n : side->chain()) {
            if (auto dz = n->as_depth_zero())
                cands.push_back(Poly::linear_root(dz->first));
            else if (n->kind() != NodeKind::root)
                cands.push_back(n->phi());
        }
    for (const Poly& f : cands) {
        try {
            GroupElem va = a->eval(f), vb = b->eval(f);
            if (va > vb)
                return Json{{"witness", poly_to_json(f)},
                            {"value_first", va.str()},
                            {"value_second", vb.str()}};
        } catch (const stability_error&) {
            continue;
        }
    }
    return std::nullopt;
}

// Separating data for a strict comparison m < n: a polynomial whose value
// grows, with the values on both sides.
Json growth_certificate(const NodePtr& m, const NodePtr& n) {
    Poly w = tangent_direction(m, n);
    return Json{{"witness", poly_to_json(w)},
                {"value_at_result", m->eval(w).str()},
                {"value_at_input", n->eval(w).str()}};
}

int cmd_eval(const RunConfig& cfg, const std::string& node_file, const std::string& poly_str) {
    GroundValuation gv = cfg.gv();
    NodePtr n = load_node(node_file, gv);
    Poly f = parse_poly(poly_str);
    GroupElem v = n->eval(f);
    if (cfg.json)
        emit(Json{{"op", "eval"}, {"poly", poly_to_json(f)}, {"value", v.str()}});
    else
        std::cout << v.str() << "\n";
    return 0;
}

int cmd_validate(const RunConfig& cfg, const std::string& chain_file) {
    Chain c = chain_from_json(read_json_file(chain_file));
    ValidationReport rep = validate_mlv(c);
    if (cfg.json) {
        Json checks = Json::array();
        for (const CheckItem& it : rep.items)
            checks.push_back(Json{{"code", it.code},
                                  {"status", cert_str(it.status)},
                                  {"detail", it.detail}});
        emit(Json{{"op", "validate"},
                  {"verdict", rep.verdict},
                  {"depth", rep.depth},
                  {"lim_depth", rep.lim_depth},
                  {"checks", checks}});
    } else {
        std::cout << "verdict: " << rep.verdict << " (depth " << rep.depth
                  << ", limit depth " << rep.lim_depth << ")\n";
        for (const CheckItem& it : rep.items)
            if (it.status != Cert::yes)
                std::cout << "  [" << cert_str(it.status) << "] " << it.code << ": "
                          << it.detail << "\n";
    }
    if (rep.verdict == "valid") return 0;
    return rep.verdict == "invalid" ? 1 : 3;
}

int cmd_depth(const RunConfig& cfg, const std::string& chain_file) {
    Chain c = chain_from_json(read_json_file(chain_file));
    if (cfg.json)
        emit(Json{{"op", "depth"}, {"depth", depth(c)}, {"lim_depth", lim_depth(c)}});
    else
        std::cout << "depth: " << depth(c) << "\nlimit depth: " << lim_depth(c) << "\n";
    return 0;
}

int cmd_gcln(const RunConfig& cfg, const std::string& fa, const std::string& fb) {
    GroundValuation gv = cfg.gv();
    NodePtr a = load_node(fa, gv), b = load_node(fb, gv);
    NodePtr m = meet(a, b);
    Json cert{{"below_first", leq(m, a)}, {"below_second", leq(m, b)}};
    try {
        if (!node_equiv(m, a)) cert["gap_to_first"] = growth_certificate(m, a);
        if (!node_equiv(m, b)) cert["gap_to_second"] = growth_certificate(m, b);
    } catch (const error&) {
        // certificates are best effort; the result node stands on its own
    }
    Json rec{{"op", "gcln"}, {"result", node_to_json(m)}, {"certificate", cert}};
    if (cfg.json) {
        emit(rec);
    } else {
        std::cout << "greatest common lower node:\n" << node_to_json(m).dump(2) << "\n";
        std::cout << "below both inputs: "
                  << ((leq(m, a) && leq(m, b)) ? "yes" : "no") << "\n";
    }
    return 0;
}

int cmd_leq(const RunConfig& cfg, const std::string& fa, const std::string& fb) {
    GroundValuation gv = cfg.gv();
    NodePtr a = load_node(fa, gv), b = load_node(fb, gv);
    bool holds = leq(a, b);
    Json cert{{"holds", holds}};
    if (!holds) {
        if (auto w = refutation(a, b)) cert["refutation"] = *w;
    } else if (!node_equiv(a, b)) {
        cert["strict"] = true;
        try {
            cert["growth"] = growth_certificate(a, b);
        } catch (const error&) {
        }
    }
    if (cfg.json)
        emit(Json{{"op", "leq"}, {"result", holds}, {"certificate", cert}});
    else
        std::cout << (holds ? "yes" : "no") << "\n";
    return holds ? 0 : 1;
}

int cmd_dist(const RunConfig& cfg, const std::string& fa, const std::string& fb) {
    GroundValuation gv = cfg.gv();
    NodePtr a = load_node(fa, gv), b = load_node(fb, gv);
    GroupElem d = tree_distance(a, b);
    NodePtr m = meet(a, b);
    Json cert{{"meet", node_to_json(m)},
              {"sv_first", a->sv().str()},
              {"sv_second", b->sv().str()},
              {"sv_meet", m->sv().str()}};
    if (cfg.json)
        emit(Json{{"op", "dist"}, {"result", d.str()}, {"certificate", cert}});
    else
        std::cout << d.str() << "\n";
    return 0;
}

int cmd_tangent(const RunConfig& cfg, const std::string& fa, const std::string& fb) {
    GroundValuation gv = cfg.gv();
    NodePtr a = load_node(fa, gv), b = load_node(fb, gv);
    Poly w = tangent_direction(a, b);
    Json rec{{"op", "tangent"},
             {"result", poly_to_json(w)},
             {"certificate",
              Json{{"value_at_first", a->eval(w).str()},
                   {"value_at_second", b->eval(w).str()}}}};
    if (cfg.json)
        emit(rec);
    else
        std::cout << poly_to_json(w).get<std::string>() << "\n";
    return 0;
}

int cmd_equiv(const RunConfig& cfg, const std::string& fa, const std::string& fb) {
    GroundValuation gv = cfg.gv();
    NodePtr a = load_node(fa, gv), b = load_node(fb, gv);
    EquivResult r = equiv_nodes(a, b);
    Json cert{{"reason", r.reason}};
    if (r.cert == Cert::no) {
        if (auto w = refutation(a, b))
            cert["refutation"] = *w;
        else if (auto w2 = refutation(b, a))
            cert["refutation"] = *w2;
    }
    if (cfg.json)
        emit(Json{{"op", "equiv"}, {"result", cert_str(r.cert)}, {"certificate", cert}});
    else
        std::cout << cert_str(r.cert) << " -- " << r.reason << "\n";
    if (r.cert == Cert::yes) return 0;
    return r.cert == Cert::no ? 1 : 3;
}

int cmd_sme_classify(const RunConfig& cfg, const std::string& elem) {
    GroupElem e = parse_group_elem(elem, cfg.rank);
    auto G = SubgroupDescriptor::integers();
    QuasiCut qc = quasi_cut(e, G);
    GroupElem canon = sme_canonical(e, G);
    if (cfg.json)
        emit(Json{{"op", "sme_classify"},
                  {"input", e.str()},
                  {"cut", qc.str()},
                  {"canonical", canon.str()}});
    else
        std::cout << qc.str() << ", canonical " << canon.str() << "\n";
    return 0;
}

int cmd_sme_equiv(const RunConfig& cfg, const std::string& ea, const std::string& eb) {
    GroupElem x = parse_group_elem(ea, cfg.rank), y = parse_group_elem(eb, cfg.rank);
    auto G = SubgroupDescriptor::integers();
    bool same = sme_equiv(x, y, G);
    if (cfg.json)
        emit(Json{{"op", "sme_equiv"},
                  {"result", same},
                  {"certificate",
                   Json{{"cut_first", quasi_cut(x, G).str()},
                        {"cut_second", quasi_cut(y, G).str()}}}});
    else
        std::cout << (same ? "yes" : "no") << "\n";
    return same ? 0 : 1;
}

int cmd_sme_canonical(const RunConfig& cfg, const std::string& elem) {
    GroupElem e = parse_group_elem(elem, cfg.rank);
    GroupElem canon = sme_canonical(e, SubgroupDescriptor::integers());
    if (cfg.json)
        emit(Json{{"op", "sme_canonical"}, {"input", e.str()}, {"result", canon.str()}});
    else
        std::cout << canon.str() << "\n";
    return 0;
}

int cmd_newton(const RunConfig& cfg, const std::string& node_file, const std::string& phi_str,
               const std::string& f_str) {
    GroundValuation gv = cfg.gv();
    NodePtr n = load_node(node_file, gv);
    NewtonData nd = newton_data(n, parse_poly(phi_str), parse_poly(f_str));
    if (cfg.json) {
        Json points = Json::array(), hull = Json::array(), segs = Json::array();
        for (const NewtonPoint& p : nd.points)
            points.push_back(Json{{"s", p.s}, {"value", p.value.str()}});
        for (const auto& [s, v] : nd.hull)
            hull.push_back(Json{{"s", s}, {"value", rational_str(v)}});
        for (const NewtonSegment& sg : nd.segments)
            segs.push_back(Json{{"from", sg.s0}, {"to", sg.s1}, {"slope", rational_str(sg.slope)}});
        emit(Json{{"op", "newton"},
                  {"phi", poly_to_json(nd.phi)},
                  {"points", points},
                  {"excluded_mixed", nd.excluded_mixed},
                  {"hull", hull},
                  {"segments", segs},
                  {"sketch", render_ascii(nd)}});
    } else {
        std::cout << render_ascii(nd);
    }
    return 0;
}

int cmd_family_stable(const RunConfig& cfg, const std::string& fam_file,
                      const std::string& poly_str) {
    FamilyPtr fam = family_from_json(read_json_file(fam_file), cfg.gv());
    Poly f = parse_poly(poly_str);
    StabilityResult r = fam->stable_value(f);
    if (auto* s = std::get_if<StableValue>(&r)) {
        if (cfg.json)
            emit(Json{{"op", "family_stable_value"},
                      {"poly", poly_to_json(f)},
                      {"value", s->value.str()},
                      {"certified_at", s->certified_at},
                      {"short_circuit", s->short_circuit}});
        else
            std::cout << s->value.str() << "  (certified after " << s->certified_at
                      << " members)\n";
        return 0;
    }
    const auto& u = std::get<UnstableUpTo>(r);
    Json vals = Json::array();
    for (const GroupElem& v : u.values) vals.push_back(v.str());
    if (cfg.json)
        emit(Json{{"op", "family_stable_value"},
                  {"poly", poly_to_json(f)},
                  {"unstable_through", u.members_tried},
                  {"values", vals}});
    else
        std::cout << "unstable through " << u.members_tried << " members\n";
    return 3;
}

int cmd_family_unstable(const RunConfig& cfg, const std::string& fam_file,
                        const std::vector<std::string>& cand_strs) {
    FamilyPtr fam = family_from_json(read_json_file(fam_file), cfg.gv());
    std::vector<Poly> cands;
    for (const std::string& s : cand_strs) cands.push_back(parse_poly(s));
    UnstableSearch us = fam->find_unstable(cands);
    const char* cls = us.cls == FamilyClass::essential     ? "essential"
                      : us.cls == FamilyClass::inessential ? "inessential"
                                                           : "unknown";
    if (us.witness) {
        if (cfg.json)
            emit(Json{{"op", "family_unstable"},
                      {"witness", poly_to_json(*us.witness)},
                      {"degree", us.unstable_degree},
                      {"class", cls},
                      {"members_tried", us.members_tried}});
        else
            std::cout << poly_to_json(*us.witness).get<std::string>() << "  (degree "
                      << us.unstable_degree << ", family " << cls << ")\n";
        return 0;
    }
    if (cfg.json)
        emit(Json{{"op", "family_unstable"},
                  {"witness", nullptr},
                  {"class", cls},
                  {"members_tried", us.members_tried}});
    else
        std::cout << "no unstable polynomial among the candidates within "
                  << us.members_tried << " members\n";
    return 3;
}

int cmd_family_gamma(const RunConfig& cfg, const std::string& fam_file) {
    FamilyPtr fam = family_from_json(read_json_file(fam_file), cfg.gv());
    GroupElem sup = fam->value_sup();
    if (cfg.json)
        emit(Json{{"op", "family_gamma"}, {"value_sup", sup.str()}});
    else
        std::cout << sup.str() << "\n";
    return 0;
}

int cmd_example_vaquie(const RunConfig& cfg, const std::string& emit_dir) {
    GroundValuation gv = cfg.gv();
    WorkedExample ex = worked_example(gv); // rejects p in {2, 3, 5}
    auto nodes = ex.mus;

    Json table = Json::array();
    const char* names[] = {"mu0", "mu1", "mu2", "mu3"};
    for (std::size_t i = 0; i < nodes.size(); ++i)
        table.push_back(Json{{"node", names[i]},
                             {"key", poly_to_json(ex.phis[i])},
                             {"degree", nodes[i]->degree()},
                             {"gamma", nodes[i]->sv().str()},
                             {"e_rel", nodes[i]->ramification_index().str()}});
    ExtensionIndex prod = ramification_product(nodes);
    Json nu;
    for (int k = 0; k < 3; ++k) {
        // scaling by the ramification product clears every denominator, so the
        // row prints as plain integers
        GroupElem scaled = scalar_mul(30L, nodes[3]->eval(ex.phis[static_cast<std::size_t>(k)]));
        nu["phi" + std::to_string(k)] = rational_str(scaled.main());
    }

    if (cfg.json) {
        emit(Json{{"op", "example"},
                  {"prime", cfg.prime},
                  {"table", table},
                  {"ramification_product", prod.str()},
                  {"nu_30_mu3", nu},
                  {"chain", chain_to_json(ex.chain)}});
    } else {
        std::cout << "key polynomials (p = " << cfg.prime << "):\n";
        for (std::size_t i = 0; i < ex.phis.size(); ++i)
            std::cout << "  phi" << i << " = " << poly_to_json(ex.phis[i]).get<std::string>()
                      << "\n";
        std::cout << "\n  node   degree   gamma       e_rel\n";
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            std::cout << "  " << names[i] << "    " << nodes[i]->degree();
            std::cout << std::string(nodes[i]->degree() >= 10 ? 6 : 7, ' ')
                      << nodes[i]->sv().str();
            std::cout << "   e_rel " << nodes[i]->ramification_index().str() << "\n";
        }
        std::cout << "\nramification product: " << prod.str() << "\n";
        std::cout << "nu = 30*mu3:  nu(phi0) = " << nu["phi0"].get<std::string>()
                  << "   nu(phi1) = " << nu["phi1"].get<std::string>()
                  << "   nu(phi2) = " << nu["phi2"].get<std::string>() << "\n";
    }

    if (!emit_dir.empty()) {
        std::filesystem::create_directories(emit_dir);
        auto at = [&](const std::string& name) { return emit_dir + "/" + name; };
        write_json_file(at("root.json"), node_to_json(Node::make_root(gv)));
        for (std::size_t i = 0; i < nodes.size(); ++i)
            write_json_file(at(std::string(names[i]) + ".json"), node_to_json(nodes[i]));
        write_json_file(at("chain.json"), chain_to_json(ex.chain));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    int rc = 0;

    CLI::App app{"exact valuations on K[x] over a p-adic base"};
    app.require_subcommand(1);
    app.add_option("--prime", cfg.prime, "ground prime p")->envname("VALTREE_PRIME");
    app.add_option("--rank", cfg.rank, "lexicographic value-group rank")
        ->envname("VALTREE_RANK");
    app.add_option("--horizon", cfg.horizon, "family materialization horizon")
        ->envname("VALTREE_HORIZON");
    app.add_flag("--json", cfg.json, "emit machine-readable JSON records")
        ->envname("VALTREE_JSON");

    std::string file_a, file_b, text_a, text_b;
    std::vector<std::string> cand_strs;
    std::string emit_dir;

    auto* s_eval = app.add_subcommand("eval", "evaluate a polynomial under a node");
    s_eval->add_option("node", file_a, "node JSON file")->required();
    s_eval->add_option("poly", text_a, "polynomial")->required();
    s_eval->callback([&] { rc = cmd_eval(cfg, file_a, text_a); });

    auto* s_val = app.add_subcommand("validate", "check the chain conditions");
    s_val->add_option("chain", file_a, "chain JSON file")->required();
    s_val->callback([&] { rc = cmd_validate(cfg, file_a); });

    auto* s_dep = app.add_subcommand("depth", "report depth and limit depth");
    s_dep->add_option("chain", file_a, "chain JSON file")->required();
    s_dep->callback([&] { rc = cmd_depth(cfg, file_a); });

    auto* s_gcln = app.add_subcommand("gcln", "greatest common lower node");
    s_gcln->add_option("first", file_a, "node JSON file")->required();
    s_gcln->add_option("second", file_b, "node JSON file")->required();
    s_gcln->callback([&] { rc = cmd_gcln(cfg, file_a, file_b); });

    auto* s_leq = app.add_subcommand("leq", "structural order comparison");
    s_leq->add_option("first", file_a, "node JSON file")->required();
    s_leq->add_option("second", file_b, "node JSON file")->required();
    s_leq->callback([&] { rc = cmd_leq(cfg, file_a, file_b); });

    auto* s_dist = app.add_subcommand("dist", "tree distance between two nodes");
    s_dist->add_option("first", file_a, "node JSON file")->required();
    s_dist->add_option("second", file_b, "node JSON file")->required();
    s_dist->callback([&] { rc = cmd_dist(cfg, file_a, file_b); });

    auto* s_tan = app.add_subcommand("tangent", "separating direction for ordered nodes");
    s_tan->add_option("first", file_a, "node JSON file")->required();
    s_tan->add_option("second", file_b, "node JSON file")->required();
    s_tan->callback([&] { rc = cmd_tangent(cfg, file_a, file_b); });

    auto* s_eq = app.add_subcommand("equiv", "decide equality as valuations");
    s_eq->add_option("first", file_a, "node JSON file")->required();
    s_eq->add_option("second", file_b, "node JSON file")->required();
    s_eq->callback([&] { rc = cmd_equiv(cfg, file_a, file_b); });

    auto* s_sme = app.add_subcommand("sme", "cut classification of group elements");
    s_sme->require_subcommand(1);
    auto* s_cls = s_sme->add_subcommand("classify", "cut class and canonical form");
    s_cls->add_option("elem", text_a, "group element")->required();
    s_cls->callback([&] { rc = cmd_sme_classify(cfg, text_a); });
    auto* s_seq = s_sme->add_subcommand("equiv", "same cut class?");
    s_seq->add_option("first", text_a, "group element")->required();
    s_seq->add_option("second", text_b, "group element")->required();
    s_seq->callback([&] { rc = cmd_sme_equiv(cfg, text_a, text_b); });
    auto* s_can = s_sme->add_subcommand("canonical", "canonical representative");
    s_can->add_option("elem", text_a, "group element")->required();
    s_can->callback([&] { rc = cmd_sme_canonical(cfg, text_a); });

    auto* s_new = app.add_subcommand("newton", "polygon of a phi-expansion");
    s_new->add_option("node", file_a, "node JSON file")->required();
    s_new->add_option("phi", text_a, "expansion polynomial")->required();
    s_new->add_option("poly", text_b, "polynomial to expand")->required();
    s_new->callback([&] { rc = cmd_newton(cfg, file_a, text_a, text_b); });

    auto* s_fam = app.add_subcommand("family", "limit-family queries");
    s_fam->require_subcommand(1);
    auto* s_fs = s_fam->add_subcommand("stable-value", "stable value along the family");
    s_fs->add_option("family", file_a, "family JSON file")->required();
    s_fs->add_option("poly", text_a, "polynomial")->required();
    s_fs->callback([&] { rc = cmd_family_stable(cfg, file_a, text_a); });
    auto* s_fu = s_fam->add_subcommand("unstable", "search for an unstable polynomial");
    s_fu->add_option("family", file_a, "family JSON file")->required();
    s_fu->add_option("--candidate", cand_strs, "extra candidate polynomial");
    s_fu->callback([&] { rc = cmd_family_unstable(cfg, file_a, cand_strs); });
    auto* s_fg = s_fam->add_subcommand("gamma", "supremum of the member values");
    s_fg->add_option("family", file_a, "family JSON file")->required();
    s_fg->callback([&] { rc = cmd_family_gamma(cfg, file_a); });

    auto* s_ex = app.add_subcommand("example", "built-in worked objects");
    s_ex->require_subcommand(1);
    auto* s_vq = s_ex->add_subcommand("vaquie", "depth-three chain with its value table");
    s_vq->add_option("--emit-nodes", emit_dir, "write node/chain JSON files here");
    s_vq->callback([&] { rc = cmd_example_vaquie(cfg, emit_dir); });

    for (CLI::App* sub : {s_eval, s_val, s_dep, s_gcln, s_leq, s_dist, s_tan, s_eq, s_sme,
                          s_cls, s_seq, s_can, s_new, s_fam, s_fs, s_fu, s_fg, s_ex, s_vq})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const stability_error& e) {
        std::cerr << "undecided: " << e.what() << " (after " << e.prefix_tried
                  << " members)\n";
        return 3;
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const precondition_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
