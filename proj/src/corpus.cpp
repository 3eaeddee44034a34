#include "xorhorn/corpus.hpp"

namespace xorhorn {

namespace {

constexpr const char* kDolevYao = R"(# Dolev-Yao intruder
[intruder] I(X) -> I(h(X)).
[intruder] I(X), I(Y) -> I(pair(X, Y)).
[intruder] I(pair(X, Y)) -> I(X).
[intruder] I(pair(X, Y)) -> I(Y).
[intruder] I(X), I(Y) -> I(senc(X, Y)).
[intruder] I(senc(X, Y)), I(Y) -> I(X).
[intruder] I(X), I(pub(Y)) -> I(penc(X, pub(Y))).
[intruder] I(penc(X, pub(Y))), I(Y) -> I(X).
)";

constexpr const char* kNslHeader = R"(fun pub/1. fun penc/2. fun pair/2. fun senc/2. fun h/1.
fun n/2. fun m/2.
const a. const b. const ska. const skb.

-> I(a).
-> I(b).
-> I(pub(ska)).
-> I(pub(skb)).
-> I(skb).
)";

constexpr const char* kNslBody = R"(
# message 1, initiator a
[protocol] -> I(penc(pair(n(a, a), a), pub(ska))).
[protocol] -> I(penc(pair(n(a, b), a), pub(skb))).

# message 2, responder answers initiator
[protocol] I(penc(pair(X, a), pub(ska))) -> I(penc(pair(m(a, a), X + a), pub(ska))).
[protocol] I(penc(pair(X, b), pub(ska))) -> I(penc(pair(m(a, b), X + a), pub(skb))).
[protocol] I(penc(pair(X, a), pub(skb))) -> I(penc(pair(m(b, a), X + b), pub(ska))).
[protocol] I(penc(pair(X, b), pub(skb))) -> I(penc(pair(m(b, b), X + b), pub(skb))).

# message 3, initiator a
[protocol] I(penc(pair(Y, n(a, a) + a), pub(ska))) -> I(penc(Y, pub(ska))).
[protocol] I(penc(pair(Y, n(a, b) + b), pub(ska))) -> I(penc(Y, pub(skb))).

query secret m(b, a).
)";

constexpr const char* kNslFixBody = R"(
[protocol] -> I(penc(pair(n(a, a), a), pub(ska))).
[protocol] -> I(penc(pair(n(a, b), a), pub(skb))).

# the responder binds its nonce to the received one before masking
[protocol] I(penc(pair(X, a), pub(ska))) -> I(penc(pair(m(a, a), h(pair(X, m(a, a))) + a), pub(ska))).
[protocol] I(penc(pair(X, b), pub(ska))) -> I(penc(pair(m(a, b), h(pair(X, m(a, b))) + a), pub(skb))).
[protocol] I(penc(pair(X, a), pub(skb))) -> I(penc(pair(m(b, a), h(pair(X, m(b, a))) + b), pub(ska))).
[protocol] I(penc(pair(X, b), pub(skb))) -> I(penc(pair(m(b, b), h(pair(X, m(b, b))) + b), pub(skb))).

[protocol] I(penc(pair(Y, h(pair(n(a, a), Y)) + a), pub(ska))) -> I(penc(Y, pub(ska))).
[protocol] I(penc(pair(Y, h(pair(n(a, b), Y)) + b), pub(ska))) -> I(penc(Y, pub(skb))).

query secret m(b, a).
)";

// Three participants, a and b honest, i played by the intruder.
constexpr const char* kNslAuth = R"(fun pub/1. fun penc/2. fun pair/2. fun senc/2. fun h/1.
fun n/3. fun m/4.
const a. const b. const i. const ska. const skb. const ski.
const sid0. const sid1.
pred eBegin/3. pred eEnd/3.

-> I(a).
-> I(b).
-> I(i).
-> I(pub(ska)).
-> I(pub(skb)).
-> I(pub(ski)).
-> I(ski).

exempt Sid. [protocol] -> I(penc(pair(n(a, a, Sid), a), pub(ska))).
exempt Sid. [protocol] -> I(penc(pair(n(a, b, Sid), a), pub(skb))).
exempt Sid. [protocol] -> I(penc(pair(n(a, i, Sid), a), pub(ski))).
exempt Sid. [protocol] -> I(penc(pair(n(b, a, Sid), b), pub(ska))).
exempt Sid. [protocol] -> I(penc(pair(n(b, b, Sid), b), pub(skb))).
exempt Sid. [protocol] -> I(penc(pair(n(b, i, Sid), b), pub(ski))).

exempt Sid. [protocol] I(penc(pair(X, a), pub(ska))) -> I(penc(pair(m(a, a, Sid, X), X + a), pub(ska))).
exempt Sid. [protocol] I(penc(pair(X, b), pub(ska))) -> I(penc(pair(m(a, b, Sid, X), X + a), pub(skb))).
exempt Sid. [protocol] I(penc(pair(X, i), pub(ska))) -> I(penc(pair(m(a, i, Sid, X), X + a), pub(ski))).
exempt Sid. [protocol] I(penc(pair(X, a), pub(skb))) -> I(penc(pair(m(b, a, Sid, X), X + b), pub(ska))).
exempt Sid. [protocol] I(penc(pair(X, b), pub(skb))) -> I(penc(pair(m(b, b, Sid, X), X + b), pub(skb))).
exempt Sid. [protocol] I(penc(pair(X, i), pub(skb))) -> I(penc(pair(m(b, i, Sid, X), X + b), pub(ski))).

[event] eBegin(a, a, Y), I(penc(pair(Y, n(a, a, Sid) + a), pub(ska))) -> I(penc(Y, pub(ska))).
[event] eBegin(a, b, Y), I(penc(pair(Y, n(a, b, Sid) + b), pub(ska))) -> I(penc(Y, pub(skb))).
[event] eBegin(a, i, Y), I(penc(pair(Y, n(a, i, Sid) + i), pub(ska))) -> I(penc(Y, pub(ski))).
[event] eBegin(b, a, Y), I(penc(pair(Y, n(b, a, Sid) + a), pub(skb))) -> I(penc(Y, pub(ska))).
[event] eBegin(b, b, Y), I(penc(pair(Y, n(b, b, Sid) + b), pub(skb))) -> I(penc(Y, pub(skb))).
[event] eBegin(b, i, Y), I(penc(pair(Y, n(b, i, Sid) + i), pub(skb))) -> I(penc(Y, pub(ski))).

[event] I(penc(pair(X, a), pub(ska))), I(penc(m(a, a, Sid, X), pub(ska))) -> eEnd(a, a, m(a, a, Sid, X)).
[event] I(penc(pair(X, b), pub(ska))), I(penc(m(a, b, Sid, X), pub(ska))) -> eEnd(b, a, m(a, b, Sid, X)).
[event] I(penc(pair(X, i), pub(ska))), I(penc(m(a, i, Sid, X), pub(ska))) -> eEnd(i, a, m(a, i, Sid, X)).
[event] I(penc(pair(X, a), pub(skb))), I(penc(m(b, a, Sid, X), pub(skb))) -> eEnd(a, b, m(b, a, Sid, X)).
[event] I(penc(pair(X, b), pub(skb))), I(penc(m(b, b, Sid, X), pub(skb))) -> eEnd(b, b, m(b, b, Sid, X)).
[event] I(penc(pair(X, i), pub(skb))), I(penc(m(b, i, Sid, X), pub(skb))) -> eEnd(i, b, m(b, i, Sid, X)).

# a runs with i; i relays the masked nonce to b in a's name
query corresp eEnd(A, B, M) ~> eBegin(A, B, M)
  given { eBegin(a, i, m(b, a, sid0, n(a, i, sid0) + b + i)) }
  goal eEnd(a, b, m(b, a, sid0, n(a, i, sid0) + b + i)).
)";

// CCA API with data = 0. The intruder holds the third key part k3, the
// pdk import message and the key-part message for kk = k1 + k2.
constexpr const char* kCcaHeader = R"(fun e/2.
const km. const kp. const imp. const exp. const pin.
const kk. const k3. const pdk.

[intruder] I(X), I(Y) -> I(e(X, Y)).
[intruder] I(e(X, Y)), I(Y) -> I(X).

-> I(k3).
-> I(imp).
-> I(exp).
-> I(pin).
-> I(e(pdk, kk + k3 + pin)).
-> I(e(kk, km + kp + imp)).
)";

constexpr const char* kCcaData = R"(
# Encipher, Decipher
[protocol] I(X), I(e(K, km)) -> I(e(X, K)).
[protocol] I(e(X, K)), I(e(K, km)) -> I(X).
)";

constexpr const char* kCcaExport = R"(
# KeyExport
[protocol] I(e(K, km)), I(0), I(e(KEK, km + exp)) -> I(e(K, KEK)).
[protocol] I(e(K, km + imp)), I(imp), I(e(KEK, km + exp)) -> I(e(K, KEK + imp)).
[protocol] I(e(K, km + exp)), I(exp), I(e(KEK, km + exp)) -> I(e(K, KEK + exp)).
[protocol] I(e(K, km + pin)), I(pin), I(e(KEK, km + exp)) -> I(e(K, KEK + pin)).
)";

constexpr const char* kCcaImport = R"(
# KeyImport
[protocol] I(e(K, KEK)), I(0), I(e(KEK, km + imp)) -> I(e(K, km)).
[protocol] I(e(K, KEK + imp)), I(imp), I(e(KEK, km + imp)) -> I(e(K, km + imp)).
[protocol] I(e(K, KEK + exp)), I(exp), I(e(KEK, km + imp)) -> I(e(K, km + exp)).
[protocol] I(e(K, KEK + pin)), I(pin), I(e(KEK, km + imp)) -> I(e(K, km + pin)).
)";

// KeyPartImp-Last unfolded against the only key-part message in circulation.
constexpr const char* kCcaLast = R"(
# KeyPartImp-Last
[protocol] I(K3), I(e(kk, km + kp + imp)), I(imp) -> I(e(kk + K3, km + imp)).
)";

constexpr const char* kCcaTranslate = R"(
# KeyTranslate
[protocol] I(e(K, KEK1)), I(0), I(e(KEK1, km + imp)), I(e(KEK2, km + exp)) -> I(e(K, KEK2)).
[protocol] I(e(K, KEK1 + imp)), I(imp), I(e(KEK1, km + imp)), I(e(KEK2, km + exp)) -> I(e(K, KEK2 + imp)).
[protocol] I(e(K, KEK1 + exp)), I(exp), I(e(KEK1, km + imp)), I(e(KEK2, km + exp)) -> I(e(K, KEK2 + exp)).
[protocol] I(e(K, KEK1 + pin)), I(pin), I(e(KEK1, km + imp)), I(e(KEK2, km + exp)) -> I(e(K, KEK2 + pin)).
)";

constexpr const char* kCcaQuery = "\nquery secret pdk.\n";

std::vector<CorpusEntry> build() {
    const std::string dy = kDolevYao;
    const std::string cca = kCcaHeader;
    return {
        {"nsl-xor", "Needham-Schroeder-Lowe with xor, secrecy of m(b,a)", std::string(kNslHeader) + dy + kNslBody},
        {"nsl-xor-fix", "nsl-xor with the hashed second message", std::string(kNslHeader) + dy + kNslFixBody},
        {"nsl-xor-auth", "nsl-xor with session ids and begin/end events", std::string(kNslAuth) + dy},
        {"cca-0", "IBM 4758 CCA key import, all commands",
         cca + kCcaData + kCcaExport + kCcaImport + kCcaLast + kCcaTranslate + kCcaQuery},
        {"cca-2b", "CCA key-part role: key part import, key import, encipher",
         cca + "\n[protocol] I(X), I(e(K, km)) -> I(e(X, K)).\n" + kCcaImport + kCcaLast + kCcaQuery},
        {"cca-2c", "CCA transport role: export, import, translate", cca + kCcaExport + kCcaImport + kCcaTranslate + kCcaQuery},
        {"cca-2e", "CCA operator role: data commands and export", cca + kCcaData + kCcaExport + kCcaQuery},
    };
}

}  // namespace

const std::vector<CorpusEntry>& corpus() {
    static const std::vector<CorpusEntry> entries = build();
    return entries;
}

std::optional<CorpusEntry> corpus_entry(std::string_view name) {
    for (const auto& e : corpus()) {
        if (e.name == name) return e;
    }
    return std::nullopt;
}

}  // namespace xorhorn
