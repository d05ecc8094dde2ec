#include "sanscrypt/cnf.hpp"

#include <cstdlib>
#include <ostream>
#include <sstream>

namespace sanscrypt {

void Cnf::add(Clause clause) {
    if (clause.empty()) throw std::invalid_argument("empty clause");
    for (Lit l : clause) {
        if (l == 0 || std::abs(l) > num_vars) {
            throw std::invalid_argument("literal " + std::to_string(l) + " references an undeclared variable");
        }
    }
    clauses.push_back(std::move(clause));
}

Cnf to_cnf(const UnrolledCircuit& u, std::span<const Lit> assumptions) {
    Cnf f;
    const auto nodes = u.nodes();
    const auto& base = u.base();
    for (const auto& n : nodes) {
        const bool named = n.kind != UnrolledNode::Kind::Const0;
        f.new_var({n.frame, named ? base.net_name(n.net) : std::string("reset0")});
    }
    std::vector<Lit> ins;
    for (std::size_t id = 0; id < nodes.size(); ++id) {
        const auto& n = nodes[id];
        const Lit y = static_cast<Lit>(id) + 1;
        if (n.kind == UnrolledNode::Kind::Const0) {
            f.add({-y});
        } else if (n.kind == UnrolledNode::Kind::Gate) {
            ins.clear();
            for (auto in : n.fanin) ins.push_back(static_cast<Lit>(in) + 1);
            encode_gate(f, n.gate, y, ins);
        }
    }
    for (Lit a : assumptions) f.add({a});
    return f;
}

void write_dimacs(std::ostream& out, const Cnf& f) {
    out << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
    for (const auto& c : f.clauses) {
        for (Lit l : c) out << l << ' ';
        out << "0\n";
    }
}

std::string to_dimacs(const Cnf& f) {
    std::ostringstream out;
    write_dimacs(out, f);
    return out.str();
}

Cnf parse_dimacs(const std::string& text) {
    Cnf f;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    std::size_t declared_clauses = 0;
    Clause current;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok) || tok == "c" || tok[0] == 'c') continue;
        if (tok == "p") {
            std::string fmt;
            long vars = -1;
            long count = -1;
            if (header || !(ls >> fmt >> vars >> count) || fmt != "cnf" || vars < 0 || count < 0) {
                throw DimacsError(line_no, "malformed problem line");
            }
            header = true;
            for (long v = 0; v < vars; ++v) f.new_var();
            declared_clauses = static_cast<std::size_t>(count);
            continue;
        }
        if (!header) throw DimacsError(line_no, "clause before the problem line");
        do {
            char* end = nullptr;
            const long v = std::strtol(tok.c_str(), &end, 10);
            if (*end != '\0') throw DimacsError(line_no, "bad literal '" + tok + "'");
            if (v == 0) {
                if (current.empty()) throw DimacsError(line_no, "empty clause");
                try {
                    f.add(std::move(current));
                } catch (const std::invalid_argument& e) {
                    throw DimacsError(line_no, e.what());
                }
                current.clear();
            } else {
                current.push_back(static_cast<Lit>(v));
            }
        } while (ls >> tok);
    }
    if (!header) throw DimacsError(line_no, "missing problem line");
    if (!current.empty()) throw DimacsError(line_no, "last clause is not terminated by 0");
    if (f.clauses.size() != declared_clauses) {
        throw DimacsError(line_no, "problem line declares " + std::to_string(declared_clauses) + " clauses, found " +
                                       std::to_string(f.clauses.size()));
    }
    return f;
}

}  // namespace sanscrypt
