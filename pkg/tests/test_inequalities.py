import numpy as np
import pytest

from loewner.inequalities import (
    INEQUALITY_IDS,
    HuaInstance,
    check_cdj,
    check_hua_classical,
    check_jensen_subunital,
    check_map_hua,
    check_map_schwarz,
    check_mean_subpreservation,
    check_pinching_hua,
    check_schwarz_block,
    check_single_operator_schwarz,
    check_state_contraction_chain,
    check_state_hua,
    check_trace_schwarz,
    check_vector_schwarz,
)
from loewner.linalg_core import psd_sqrt, rank_one
from loewner.means import geometric_mean
from loewner.maps import (
    FUNCTIONS,
    det_shift,
    identity_map,
    moore_penrose,
    normalized_trace,
    pinching,
    transpose,
    vector_state,
)
from loewner.outcome import HypothesisError

from conftest import ginibre, random_hermitian, random_psd, unit_psd

NILPOTENT = np.array([[0, 1], [0, 0]], dtype=complex)
E1, E2 = np.array([1, 0]), np.array([0, 1])


def unit(rng, n):
    v = ginibre(rng, n, 1).ravel()
    return v / np.linalg.norm(v)


def test_identifier_list():
    assert len(INEQUALITY_IDS) == 17 and len(set(INEQUALITY_IDS)) == 17


class TestSchwarzBlock:
    def test_identity(self):
        out = check_schwarz_block(np.eye(2), np.eye(2), np.eye(2))
        assert out.holds and abs(out.margin) < 1e-14

    def test_nilpotent(self):
        out = check_schwarz_block(NILPOTENT, np.eye(2), np.eye(2))
        assert out.holds
        assert out.residuals["abs_block_min_eig"] == pytest.approx(0, abs=1e-14)

    def test_random_rectangular(self, rng):
        for _ in range(100):
            out = check_schwarz_block(ginibre(rng, 4), ginibre(rng, 4, 2), ginibre(rng, 4, 2))
            assert out.holds


class TestMapSchwarz:
    def test_transpose_identity_is_equality(self):
        out = check_map_schwarz("i", transpose(), np.eye(2), np.eye(2), np.eye(2))
        assert out.holds and out.equality and abs(out.margin) < 1e-12

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_transpose_random(self, n, rng):
        for _ in range(100):
            assert check_map_schwarz("i", transpose(n), ginibre(rng, n), ginibre(rng, n), ginibre(rng, n)).holds

    def test_pinching_variant_ii(self, rng):
        phi = pinching([[0, 1], [2]])
        for _ in range(100):
            assert check_map_schwarz("ii", phi, ginibre(rng, 3), ginibre(rng, 3), ginibre(rng, 3)).holds

    def test_hermitian_variant(self, rng):
        for _ in range(100):
            X = ginibre(rng, 3)
            assert check_map_schwarz("hermitian", transpose(3), random_hermitian(rng, 3), X, X).holds

    def test_refusals(self, rng):
        A = ginibre(rng, 2)
        with pytest.raises(HypothesisError) as exc:
            check_map_schwarz("ii", transpose(), A, A, A)
        assert exc.value.hypothesis == "map_two_positive"
        with pytest.raises(HypothesisError):
            check_map_schwarz("i", moore_penrose(), A, A, A)
        with pytest.raises(HypothesisError) as exc:
            check_map_schwarz("hermitian", transpose(), NILPOTENT, np.eye(2))
        assert exc.value.hypothesis == "A_hermitian"
        with pytest.raises(HypothesisError):
            check_map_schwarz("hermitian", transpose(), np.eye(2), np.eye(2), 2 * np.eye(2))
        with pytest.raises(ValueError):
            check_map_schwarz("iii", transpose(), A, A, A)

    def test_hypothesis_report(self, rng):
        A = ginibre(rng, 2)
        out = check_map_schwarz("ii", pinching([[0], [1]]), A, A, A)
        assert out.hypothesis_report == {"map_two_positive": True, "map_star": True}
        assert len(out.instance_digest) == 16


class TestVectorAndTrace:
    def test_vector_examples(self):
        assert check_vector_schwarz(np.eye(2), [1, 2j], [1, 2j]).margin == pytest.approx(0, abs=1e-14)
        out = check_vector_schwarz(NILPOTENT, E2, E1)
        assert out.residuals == {"lhs": pytest.approx(1), "rhs": pytest.approx(1)}
        assert abs(out.margin) < 1e-14

    def test_vector_random(self, rng):
        for _ in range(200):
            assert check_vector_schwarz(ginibre(rng, 4), ginibre(rng, 4, 1), ginibre(rng, 4, 1)).margin >= -1e-10

    def test_trace_examples(self):
        out = check_trace_schwarz(np.eye(2), np.eye(2), np.eye(2))
        assert out.residuals["lhs"] == pytest.approx(4) and abs(out.margin) < 1e-12
        out = check_trace_schwarz(ginibre(np.random.default_rng(0), 2), np.zeros((2, 2)), np.eye(2))
        assert out.margin == 0 and out.residuals["lhs"] == 0

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_trace_random(self, n, rng):
        for _ in range(100):
            assert check_trace_schwarz(ginibre(rng, n), ginibre(rng, n), ginibre(rng, n)).holds


class TestSingleOperator:
    def test_identity_equality(self):
        out = check_single_operator_schwarz("i", transpose(), np.eye(2))
        assert out.holds and out.equality

    def test_nilpotent_pinching(self):
        assert check_single_operator_schwarz("ii", pinching([[0], [1]]), NILPOTENT).holds

    def test_random(self, rng):
        for _ in range(100):
            assert check_single_operator_schwarz("i", transpose(3), ginibre(rng, 3)).holds
            assert check_single_operator_schwarz("ii", pinching([[0, 2], [1]]), ginibre(rng, 3)).holds

    def test_refusal(self):
        with pytest.raises(HypothesisError):
            check_single_operator_schwarz("ii", det_shift(), np.eye(2))


class TestMeanSubpreservation:
    @pytest.mark.parametrize("kind", ["geometric", "harmonic"])
    def test_transpose_equality(self, kind, rng):
        for _ in range(20):
            out = check_mean_subpreservation(kind, transpose(3), random_psd(rng, 3), random_psd(rng, 3))
            assert out.holds and out.equality

    def test_vector_state(self, rng):
        for _ in range(100):
            e = unit(rng, 3)
            A, B = random_psd(rng, 3), random_psd(rng, 3)
            out = check_mean_subpreservation("geometric", vector_state(e), A, B)
            a, b = np.vdot(e, A @ e).real, np.vdot(e, B @ e).real
            inner_mean = np.vdot(e, geometric_mean(A, B) @ e).real
            assert out.holds
            assert out.margin == pytest.approx(np.sqrt(a * b) - inner_mean, abs=1e-12)

    def test_equal_operands(self, rng):
        A = random_psd(rng, 2)
        assert abs(check_mean_subpreservation("geometric", det_shift(0.5), A, A).margin) < 1e-10

    def test_refusals(self, rng):
        A = random_psd(rng, 2)
        with pytest.raises(HypothesisError) as exc:
            check_mean_subpreservation("harmonic", det_shift(), A, A)
        assert exc.value.hypothesis == "map_linear"
        with pytest.raises(HypothesisError):
            check_mean_subpreservation("geometric", moore_penrose(), A, A)


class TestHuaClassical:
    def test_examples(self):
        assert check_hua_classical(HuaInstance(1, 1, (0.0,))).margin == pytest.approx(0.5)
        assert check_hua_classical(HuaInstance(2, 1, (1.0,))).margin == pytest.approx(0, abs=1e-15)

    def test_equality_point(self, rng):
        for _ in range(100):
            n, delta, alpha = int(rng.integers(1, 10)), rng.uniform(0.1, 10), rng.uniform(0.1, 10)
            out = check_hua_classical(HuaInstance(delta, alpha, (delta / (n + alpha),) * n))
            assert abs(out.margin) <= 1e-12 * delta ** 2

    def test_validation(self):
        with pytest.raises(ValueError):
            HuaInstance(0, 1, (1.0,))
        with pytest.raises(ValueError):
            HuaInstance(1, 1, ())


class TestStateChain:
    def test_zero(self):
        out = check_state_contraction_chain(vector_state(E1), np.zeros((2, 2)), np.zeros((2, 2)))
        assert out.residuals == {"first_gap": 0, "second_gap": 0}

    def test_equal_operands_vector_state(self, rng):
        A = ginibre(rng, 3)
        A /= 2 * np.linalg.norm(A, 2)
        out = check_state_contraction_chain(vector_state(unit(rng, 3)), A, A)
        assert abs(out.residuals["first_gap"]) < 1e-14
        assert abs(out.residuals["second_gap"]) < 1e-14

    def test_gaps_individually_nonnegative(self, rng):
        for _ in range(300):
            n = int(rng.integers(2, 5))
            phi = vector_state(unit(rng, n)) if rng.random() < 0.5 else normalized_trace(n)
            A, B = ginibre(rng, n), ginibre(rng, n)
            A /= np.linalg.norm(A, 2) * (1 + rng.uniform())
            B /= np.linalg.norm(B, 2) * (1 + rng.uniform())
            out = check_state_contraction_chain(phi, A, B)
            assert out.residuals["first_gap"] >= -1e-10
            assert out.residuals["second_gap"] >= -1e-10

    def test_refusals(self):
        with pytest.raises(HypothesisError) as exc:
            check_state_contraction_chain(vector_state(E1), 2 * np.eye(2), np.eye(2))
        assert exc.value.hypothesis == "A_contraction"
        with pytest.raises(HypothesisError):
            check_state_contraction_chain(transpose(), np.eye(2), np.eye(2))


class TestMapHua:
    def test_zero_operators(self, rng):
        out = check_map_hua(pinching([[0], [1]]), ginibre(rng, 2), np.zeros((2, 2)), np.zeros((2, 2)))
        assert out.margin == pytest.approx(1.0)

    def test_pinching_rescaled(self, rng):
        phi = pinching([[0, 1], [2]])
        for _ in range(100):
            A, X, Y = ginibre(rng, 3), ginibre(rng, 3), ginibre(rng, 3)
            absA = psd_sqrt(A.conj().T @ A)
            absAs = psd_sqrt(A @ A.conj().T)
            X *= np.sqrt(0.9 / np.linalg.norm(phi(X.conj().T @ absA @ X), 2))
            Y *= np.sqrt(0.9 / np.linalg.norm(phi(Y.conj().T @ absAs @ Y), 2))
            assert check_map_hua(phi, A, X, Y).holds

    def test_vector_state(self, rng):
        for _ in range(100):
            A = ginibre(rng, 3) / 4
            X, Y = ginibre(rng, 3) / 3, ginibre(rng, 3) / 3
            try:
                assert check_map_hua(vector_state(unit(rng, 3)), A, X, Y).holds
            except HypothesisError:
                pass

    def test_refusal(self):
        with pytest.raises(HypothesisError) as exc:
            check_map_hua(identity_map(2), np.eye(2), 2 * np.eye(2), np.eye(2) / 2)
        assert exc.value.hypothesis == "phi_left_contraction"


class TestJensen:
    def test_unitary_congruence_equality(self, rng):
        U, _ = np.linalg.qr(ginibre(rng, 3))
        out = check_jensen_subunital(FUNCTIONS["square"], [(random_hermitian(rng, 3), U)])
        assert abs(out.margin) < 1e-12

    def test_scalar_operands_equality(self, rng):
        X1, X2 = ginibre(rng, 3), ginibre(rng, 3)
        S = X1.conj().T @ X1 + X2.conj().T @ X2
        R = np.linalg.inv(psd_sqrt(S))
        out = check_jensen_subunital(FUNCTIONS["inverse"], [(0.7 * np.eye(3), X1 @ R), (0.7 * np.eye(3), X2 @ R)])
        assert abs(out.margin) < 1e-10

    def test_inverse_two_pairs(self, rng):
        for _ in range(100):
            X1, X2 = ginibre(rng, 3), ginibre(rng, 3)
            S = X1.conj().T @ X1 + X2.conj().T @ X2
            R = np.linalg.inv(psd_sqrt(S))
            A1 = random_psd(rng, 3) * 1.9 + 0.05 * np.eye(3)
            A2 = random_psd(rng, 3) * 1.9 + 0.05 * np.eye(3)
            assert check_jensen_subunital(FUNCTIONS["inverse"], [(A1, X1 @ R), (A2, X2 @ R)]).holds

    def test_refusals(self):
        with pytest.raises(HypothesisError) as exc:
            check_jensen_subunital(FUNCTIONS["square"], [(np.eye(2), 2 * np.eye(2))])
        assert exc.value.hypothesis == "normalized"
        with pytest.raises(HypothesisError) as exc:
            check_jensen_subunital(FUNCTIONS["inverse"], [(-np.eye(2), np.eye(2))])
        assert exc.value.hypothesis == "spectrum_A0"


class TestCDJ:
    def test_trace_square(self):
        assert check_cdj(normalized_trace(2), FUNCTIONS["square"], np.diag([0.0, 2.0])).margin == pytest.approx(1)

    def test_scalar_input(self):
        for phi in (normalized_trace(3), pinching([[0], [1, 2]]), transpose(3)):
            assert abs(check_cdj(phi, FUNCTIONS["neg_log"], 2 * np.eye(3)).margin) < 1e-14

    def test_pinching_neg_log(self, rng):
        for _ in range(100):
            A = random_psd(rng, 4) + 0.01 * np.eye(4)
            assert check_cdj(pinching([[0, 1], [2, 3]]), FUNCTIONS["neg_log"], A).holds

    def test_refusals(self):
        with pytest.raises(HypothesisError):
            check_cdj(det_shift(), FUNCTIONS["square"], np.eye(2))
        with pytest.raises(HypothesisError) as exc:
            check_cdj(normalized_trace(2), FUNCTIONS["inverse"], np.diag([1.0, -1.0]))
        assert exc.value.hypothesis == "spectrum_A"


class TestPinchingHua:
    def test_hand_example(self):
        out = check_pinching_hua([[0], [1]], FUNCTIONS["square"], np.zeros((2, 2)), np.eye(2))
        assert out.margin == pytest.approx(0.5)

    def test_trivial_partition_matches_jensen(self, rng):
        f = FUNCTIONS["inverse"]
        for _ in range(100):
            n = 3
            C = ginibre(rng, n) + 2 * np.eye(n)
            B = unit_psd(rng, n) * 0.9 + 0.05 * np.eye(n)
            Cinv = np.linalg.inv(C)
            out = check_pinching_hua([[0, 1, 2]], f, B, C)
            T = np.eye(n) + C.conj().T @ C
            Rm = np.linalg.inv(psd_sqrt(T))
            pairs = [(np.eye(n) - B, Rm), (Cinv.conj().T @ B @ Cinv, C @ Rm)]
            jensen = check_jensen_subunital(f, pairs)
            Tr = psd_sqrt(T)
            assert out.holds
            np.testing.assert_allclose(out.difference, Tr @ jensen.difference @ Tr, atol=1e-9 * np.abs(out.difference).max() + 1e-9)

    def test_random_block_diagonal(self, rng):
        for _ in range(100):
            U1, U2 = (np.linalg.qr(ginibre(rng, 2))[0] for _ in range(2))
            C = np.zeros((4, 4), dtype=complex)
            C[:2, :2] = U1 @ np.diag(rng.uniform(0.3, 3, 2)) @ U2
            C[2:, 2:] = U2 @ np.diag(rng.uniform(0.3, 3, 2)) @ U1
            Q = np.linalg.qr(ginibre(rng, 4))[0]
            B = (Q * rng.uniform(0.01, 0.99, 4)) @ Q.conj().T
            assert check_pinching_hua([[0, 1], [2, 3]], FUNCTIONS["inverse"], B, C).holds

    def test_refusals(self, rng):
        f = FUNCTIONS["square"]
        with pytest.raises(HypothesisError) as exc:
            check_pinching_hua([[0], [1]], f, np.zeros((2, 2)), np.ones((2, 2)) + np.eye(2))
        assert exc.value.hypothesis == "C_in_subalgebra"
        with pytest.raises(HypothesisError) as exc:
            check_pinching_hua([[0], [1]], f, np.zeros((2, 2)), np.diag([1.0, 0.0]))
        assert exc.value.hypothesis == "C_invertible"
        with pytest.raises(HypothesisError) as exc:
            check_pinching_hua([[0], [1]], FUNCTIONS["inverse"], 2 * np.eye(2), np.eye(2))
        assert exc.value.hypothesis == "spectrum_I_minus_phiB"
        with pytest.raises(HypothesisError):
            check_pinching_hua(transpose(), f, np.zeros((2, 2)), np.eye(2))


class TestStateHua:
    def test_hand_example(self):
        out = check_state_hua(vector_state(E1), FUNCTIONS["square"], np.eye(2), 1.0)
        assert out.margin == pytest.approx(0.5)

    @pytest.mark.parametrize("gamma", [0.3, 1.0, 2.5])
    def test_equality_point(self, gamma):
        # Jensen is tight where 1 - phi(B) and B / gamma coincide
        for name in ("square", "inverse", "t_log_t"):
            B = gamma / (1 + gamma) * np.eye(3)
            out = check_state_hua(normalized_trace(3), FUNCTIONS[name], B, gamma)
            assert abs(out.margin) < 1e-12

    def test_t_log_t_random(self, rng):
        for _ in range(200):
            gamma = rng.uniform(0.2, 3)
            Q = np.linalg.qr(ginibre(rng, 3))[0]
            B = (Q * (gamma * rng.uniform(0.01, min(1, 0.99 / gamma), 3))) @ Q.conj().T
            assert check_state_hua(vector_state(unit(rng, 3)), FUNCTIONS["t_log_t"], B, gamma).holds

    def test_refusals(self):
        with pytest.raises(HypothesisError):
            check_state_hua(vector_state(E1), FUNCTIONS["square"], np.eye(2), 0.0)
        with pytest.raises(HypothesisError) as exc:
            check_state_hua(vector_state(E1), FUNCTIONS["inverse"], 2 * np.eye(2), 1.0)
        assert exc.value.hypothesis == "one_minus_state_in_J"
        with pytest.raises(HypothesisError):
            check_state_hua(pinching([[0], [1]]), FUNCTIONS["square"], np.eye(2), 1.0)


def test_scalar_reduction_of_two_positive_form(rng):
    for _ in range(200):
        n = int(rng.integers(2, 5))
        A = ginibre(rng, n)
        x, y = ginibre(rng, n, 1).ravel(), ginibre(rng, n, 1).ravel()
        e = unit(rng, n)
        thm = check_map_schwarz("ii", vector_state(e), A, rank_one(x, e), rank_one(y, e))
        cor = check_vector_schwarz(A, x, y)
        s = max(1.0, cor.residuals["rhs"])
        assert abs(thm.residuals["lhs_trace"] ** 2 - cor.residuals["lhs"]) <= 1e-10 * s
        assert abs(thm.residuals["rhs_trace"] ** 2 - cor.residuals["rhs"]) <= 1e-10 * s
