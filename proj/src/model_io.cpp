#include <fmp/model_io.hpp>

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fmp {

namespace {

struct Token {
    std::string text;
    int line;
};

struct Annotations {
    std::map<int, int> latent_line;
    std::map<int, std::pair<int, int>> klass; // factor -> (class, line)
};

std::vector<Token> tokenize(std::string_view text, Annotations& notes)
{
    std::vector<Token> out;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        ++line_no;
        pos = end + 1;

        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) {
            std::istringstream comment{std::string(line.substr(hash + 1))};
            std::string word;
            comment >> word;
            if (word == "latent") {
                int f = -1;
                if (!(comment >> f)) throw parse_error("'# latent' needs a factor index", line_no);
                notes.latent_line[f] = line_no;
            } else if (word == "class") {
                int f = -1, c = -1;
                if (!(comment >> f >> c) || c < 0) throw parse_error("'# class' needs a factor index and a class", line_no);
                notes.klass[f] = {c, line_no};
            }
            line = line.substr(0, hash);
        }
        std::istringstream words{std::string(line)};
        std::string w;
        while (words >> w) out.push_back({w, line_no});
        if (end == text.size()) break;
    }
    return out;
}

class Reader {
public:
    explicit Reader(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    bool done() const { return pos_ >= tokens_.size(); }
    int line() const { return done() ? (tokens_.empty() ? 1 : tokens_.back().line) : tokens_[pos_].line; }

    const Token& next(const std::string& what)
    {
        if (done()) throw parse_error("unexpected end of input, expected " + what, line());
        return tokens_[pos_++];
    }

    long integer(const std::string& what)
    {
        const Token& t = next(what);
        char* end = nullptr;
        const long v = std::strtol(t.text.c_str(), &end, 10);
        if (end == t.text.c_str() || *end != '\0') {
            throw parse_error("unknown token '" + t.text + "', expected " + what, t.line);
        }
        return v;
    }

    double real(const std::string& what)
    {
        const Token& t = next(what);
        char* end = nullptr;
        const double v = std::strtod(t.text.c_str(), &end);
        if (end == t.text.c_str() || *end != '\0') {
            throw parse_error("unknown token '" + t.text + "', expected " + what, t.line);
        }
        return v;
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

} // namespace

FactorGraph parse_model(std::string_view text, const Semiring& s)
{
    Annotations notes;
    Reader in(tokenize(text, notes));

    const Token& head = in.next("MARKOV");
    if (head.text != "MARKOV") throw parse_error("unknown token '" + head.text + "', expected MARKOV", head.line);

    FactorGraph g(s);
    const int line_n = in.line();
    const long n = in.integer("variable count");
    if (n < 0) throw parse_error("negative variable count", line_n);
    for (long v = 0; v < n; ++v) {
        const int line = in.line();
        const long card = in.integer("cardinality of variable " + std::to_string(v));
        if (card < 1) throw parse_error("variable " + std::to_string(v) + " has cardinality " + std::to_string(card), line);
        g.add_variable(static_cast<int>(card));
    }

    const int line_f = in.line();
    const long m = in.integer("factor count");
    if (m < 0) throw parse_error("negative factor count", line_f);
    std::vector<Scope> scopes(m);
    std::vector<int> scope_lines(m);
    for (long f = 0; f < m; ++f) {
        scope_lines[f] = in.line();
        const long arity = in.integer("arity of factor " + std::to_string(f));
        if (arity < 0) throw parse_error("factor " + std::to_string(f) + " has negative arity", scope_lines[f]);
        for (long p = 0; p < arity; ++p) {
            const int line = in.line();
            const long id = in.integer("variable id in the scope of factor " + std::to_string(f));
            if (id < 0 || id >= n) {
                throw parse_error("factor " + std::to_string(f) + " refers to unknown variable " + std::to_string(id),
                                  line);
            }
            scopes[f].push_back(g.variable(static_cast<int>(id)));
        }
    }

    for (long f = 0; f < m; ++f) {
        const std::string name = "factor " + std::to_string(f);
        const int line = in.line();
        const long count = in.integer("entry count of " + name);
        const Index need = domain_size(scopes[f]);
        if (count != need) {
            throw parse_error(name + " table has " + std::to_string(count) + " entries, its scope needs " +
                                  std::to_string(need),
                              line);
        }
        Eigen::ArrayXd values(need);
        for (Index i = 0; i < need; ++i) {
            if (in.done()) {
                throw parse_error(name + " table truncated after " + std::to_string(i) + " of " +
                                      std::to_string(need) + " values",
                                  in.line());
            }
            values[i] = in.real("value of " + name);
        }
        Factor fac = [&] {
            try {
                return Factor::from_unordered(scopes[f], values);
            } catch (const domain_error& e) {
                throw parse_error(name + ": " + e.what(), scope_lines[f]);
            }
        }();
        const auto lat = notes.latent_line.find(static_cast<int>(f));
        const auto cls = notes.klass.find(static_cast<int>(f));
        g.add_factor(std::move(fac), lat != notes.latent_line.end() ? FactorRole::data_independent
                                                                    : FactorRole::data_dependent,
                     cls != notes.klass.end() ? cls->second.first : -1);
    }
    if (!in.done()) {
        const int line = in.line();
        const Token& t = in.next("end of input");
        throw parse_error("unexpected token '" + t.text + "' after the last table", line);
    }
    for (const auto& [f, line] : notes.latent_line) {
        if (f < 0 || f >= m) throw parse_error("'# latent' names unknown factor " + std::to_string(f), line);
    }
    for (const auto& [f, cl] : notes.klass) {
        if (f < 0 || f >= m) throw parse_error("'# class' names unknown factor " + std::to_string(f), cl.second);
    }
    return g;
}

FactorGraph load_model(const std::string& path, const Semiring& s)
{
    std::ifstream in(path);
    if (!in) throw domain_error("cannot open model file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str(), s);
}

std::string serialize_model(const FactorGraph& g)
{
    std::ostringstream os;
    os.precision(17);
    os << "MARKOV\n" << g.num_variables() << '\n';
    for (int v = 0; v < g.num_variables(); ++v) os << (v ? " " : "") << g.variable(v).cardinality;
    os << '\n' << g.num_factors() << '\n';
    for (int f = 0; f < g.num_factors(); ++f) {
        const Factor& fac = g.factor(f);
        os << fac.arity();
        for (const auto& v : fac.scope()) os << ' ' << v.id;
        os << '\n';
    }
    for (int f = 0; f < g.num_factors(); ++f) {
        if (g.role(f) == FactorRole::data_independent) os << "# latent " << f << '\n';
        if (g.homogeneity_class(f) >= 0) os << "# class " << f << ' ' << g.homogeneity_class(f) << '\n';
    }
    for (int f = 0; f < g.num_factors(); ++f) {
        const Factor& fac = g.factor(f);
        os << '\n' << fac.size() << '\n';
        for (Index i = 0; i < fac.size(); ++i) os << (i ? " " : "") << fac[i];
        os << '\n';
    }
    return os.str();
}

} // namespace fmp
