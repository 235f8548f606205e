#pragma once

#include <memory>
#include <vector>

#include "lcs/local/element.hpp"

namespace lcs::local {

/// F-embedding S -> T of standard tame fields.  Every such map is monomial:
///   zeta_S -> zeta_T^j,   pi_S -> zeta_T^c pi_T^d,   d = e_T / e_S.
struct Embedding {
    FieldPtr source;
    FieldPtr target;
    u64 j = 1;
    u64 c = 0;
    unsigned d = 1;

    TowerElement apply(const TowerElement& x) const;
    /// this o inner, where inner maps into this->source.
    Embedding after(const Embedding& inner) const;
    bool operator==(const Embedding& o) const { return j == o.j && c == o.c && d == o.d; }
    /// Image of zeta_S^a pi_S^v as (zeta_T exponent, pi_T exponent).
    std::pair<u64, i64> monomial_image(i64 a, i64 v) const;
};

Embedding identity_embedding(const FieldPtr& T);

/// All F-embeddings S -> T.  May be fewer than [S:F] when T is too small.
std::vector<Embedding> embeddings(const FieldPtr& S, const FieldPtr& T);
/// As embeddings(), but throws AmbientTooSmall unless there are exactly [S:F] of them.
std::vector<Embedding> all_embeddings(const FieldPtr& S, const FieldPtr& T);
/// Automorphisms of T over Q_p.
std::vector<Embedding> automorphisms(const FieldPtr& T);

struct Subfield {
    FieldPtr field;
    Embedding emb;  // field -> T
    unsigned degree() const { return field->degree(); }
};

/// Intermediate fields Q_p <= S <= T, each built in standard form with the
/// residue generator zeta_T^((q_T-1)/(q_S-1)).  Sorted by degree; the first
/// entry is Q_p and the last is T itself (with the identity).
std::vector<Subfield> enumerate_subfields(const FieldPtr& T);

/// Q_p inside T.
Subfield prime_subfield(const FieldPtr& T);

/// True when the monomial zeta_T^a pi_T^v lies in the image of the subfield.
bool monomial_in_subfield(const Subfield& S, i64 a, i64 v);
/// True when `small` is contained in `big` (both subfields of the same field).
bool subfield_contains(const Subfield& big, const Subfield& small);
/// The embedding small -> big compatible with both embeddings into the common top field.
Embedding relative_embedding(const Subfield& big, const Subfield& small);
/// Preimage of zeta_T^a pi_T^v in S (requires monomial_in_subfield).
TowerElement monomial_preimage(const Subfield& S, i64 a, i64 v);

using Matrix = std::vector<std::vector<TowerElement>>;

/// T viewed as a free module over S through an embedding, with basis
/// zeta_T^i pi_T^l (i < f_T/f_S, l < e_T/e_S).
class RelativeExtension {
public:
    explicit RelativeExtension(Embedding emb);

    const Embedding& embedding() const { return emb_; }
    const FieldPtr& base() const { return emb_.source; }
    const FieldPtr& top() const { return emb_.target; }
    unsigned degree() const { return n_; }
    unsigned ramification() const { return emb_.d; }
    TowerElement basis(unsigned k) const;

    /// Coordinates of an integral element in the basis.
    std::vector<TowerElement> coordinates(const TowerElement& y) const;
    /// Coordinates of any element (scaled through the base uniformizer).
    std::vector<TowerElement> coordinates_any(const TowerElement& y) const;
    /// N(pi_T) and N(zeta_T), cached.
    const TowerElement& norm_uniformizer() const { return norm_pi_; }
    const TowerElement& norm_zeta() const { return norm_zeta_; }
    /// Matrix of multiplication by an integral x: column k holds coordinates of x * basis(k).
    Matrix mult_matrix(const TowerElement& x) const;
    TowerElement norm(const TowerElement& x) const;
    TowerElement trace(const TowerElement& x) const;
    /// Characteristic polynomial of x over the base, lowest degree first, monic.
    std::vector<TowerElement> charpoly(const TowerElement& x) const;

private:
    TowerElement scale_to_integral(const TowerElement& x, i64& s) const;

    Embedding emb_;
    unsigned nf_ = 1;
    unsigned n_ = 1;
    std::vector<std::vector<u64>> inverse_;  // inverse of the coordinate map, mod p^K
    TowerElement norm_pi_;
    TowerElement norm_zeta_;
};

/// Charpoly of a square matrix by the division-free Berkowitz algorithm,
/// lowest degree first, monic.
std::vector<TowerElement> berkowitz(const Matrix& A, const FieldPtr& F);

} // namespace lcs::local
