#include "repq/run_io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "repq/cyclotomic.hpp"

namespace repq {

ordered_json invariants_to_json(const FieldInvariants& inv) {
    ordered_json j;
    j["q"] = inv.fd.q();
    j["D"] = inv.fd.D;
    j["h"] = inv.h;
    j["h_narrow"] = inv.h_narrow;
    j["R"] = inv.regulator;
    if (inv.fd.real()) {
        j["eps"] = {{"a", inv.eps.a.get_str()}, {"b", inv.eps.b.get_str()}};
        j["eps_norm"] = inv.eps_norm;
    }
    j["torsion_order"] = inv.torsion_order;
    return j;
}

namespace {

const char* branch_name(BoundBranch b) {
    switch (b) {
        case BoundBranch::MsTerm: return "ms_term";
        case BoundBranch::QTerm: return "q_term";
        default: return "baker_term";
    }
}

}  // namespace

ordered_json bound_result_to_json(const BoundResult& r) {
    ordered_json j;
    j["log_U"] = r.U.log_string();
    j["log_U_upper"] = r.U.log_upper();
    j["log_U_lower"] = r.U.log_lower();
    j["U_decimal"] = r.U.decimal_scientific();
    j["branch"] = branch_name(r.branch);
    j["case"] = r.real_case ? "real" : "imaginary";
    j["log_C"] = r.c_big.log_string();
    j["log_A_prime"] = r.a_prime.is_zero() ? "-inf" : r.a_prime.log_string();
    return j;
}

ordered_json half_split_to_json(const HalfSplit& hs) {
    ordered_json j;
    j["q"] = hs.q;
    j["D"] = hs.D;
    auto coeffs = [](const std::vector<Natural>& v) {
        ordered_json a = ordered_json::array();
        for (const auto& c : v) a.push_back(c.get_str());
        return a;
    };
    j["f"] = coeffs(hs.f_coeffs);
    j["g"] = coeffs(hs.g_coeffs);
    return j;
}

std::string record_to_jsonl(const SolutionRecord& rec, unsigned long q, const Natural& A,
                            const std::vector<Natural>& m_list) {
    ordered_json j;
    j["x"] = rec.x.get_str();
    j["q"] = q;
    j["A"] = A.get_str();
    ordered_json ms = ordered_json::array();
    for (const auto& m : m_list) ms.push_back(m.get_str());
    j["m"] = ms;
    j["e"] = rec.exponents;
    j["value_digits"] = rec.value.get_str().size();
    j["class_index"] = rec.class_index;
    j["bound_ok"] = rec.bound_check.all_below;
    return j.dump();
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

void write_file_atomic(const std::filesystem::path& p, const std::string& body) {
    auto tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << body;
    }
    std::filesystem::rename(tmp, p);
}

FieldCache::FieldCache(std::filesystem::path path) : path_(std::move(path)) { load(); }

std::filesystem::path FieldCache::default_path() {
    if (const char* env = std::getenv("REPQ_FIELD_CACHE")) return env;
    return std::filesystem::path("repq_field_cache.json");
}

void FieldCache::load() {
    std::ifstream in(path_);
    if (!in) return;
    ordered_json doc;
    try {
        in >> doc;
    } catch (const std::exception&) {
        return;  // corrupt cache: recompute everything
    }
    if (!doc.is_object()) return;
    for (auto& [key, val] : doc.items()) {
        try {
            unsigned long q = std::stoul(key);
            FieldInvariants inv;
            inv.fd = FieldDescriptor{val.at("D").get<long>()};
            if (inv.fd.q() != q || field_descriptor(q).D != inv.fd.D) continue;
            inv.h = val.at("h").get<unsigned>();
            inv.h_narrow = val.at("h_narrow").get<unsigned>();
            inv.regulator = val.at("R").get<double>();
            inv.torsion_order = val.at("torsion_order").get<unsigned>();
            if (inv.fd.real()) {
                inv.eps = QuadInt(Natural(val.at("eps").at("a").get<std::string>()),
                                  Natural(val.at("eps").at("b").get<std::string>()), inv.fd.D);
                inv.eps_norm = val.at("eps_norm").get<int>();
                Natural n = inv.eps.norm();
                if (n != inv.eps_norm) continue;
            } else {
                inv.eps = qi_one(inv.fd.D);
                inv.eps_norm = 1;
            }
            const double cap = std::sqrt(double(q)) * std::log(4.0 * double(q));
            if (inv.h < 1 || inv.h > cap || inv.regulator > cap) continue;  // data error
            entries_.emplace(q, std::move(inv));
        } catch (const std::exception&) {
            continue;  // drop malformed entries
        }
    }
}

void FieldCache::save() const {
    ordered_json doc = ordered_json::object();
    for (const auto& [q, inv] : entries_) doc[std::to_string(q)] = invariants_to_json(inv);
    write_file_atomic(path_, doc.dump(1) + "\n");
}

FieldInvariants FieldCache::get(unsigned long q) {
    auto it = entries_.find(q);
    if (it != entries_.end()) return it->second;
    FieldInvariants inv = field_invariants(q);
    entries_.emplace(q, inv);
    save();
    return inv;
}

ordered_json RunManifest::to_json() const {
    ordered_json j;
    j["command"] = command;
    j["argv"] = argv;
    j["version"] = version;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["parameters"] = parameters;
    ordered_json outs = ordered_json::array();
    for (const auto& [path, digest] : outputs)
        outs.push_back({{"path", path}, {"sha256", digest}});
    j["outputs"] = outs;
    return j;
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace repq
