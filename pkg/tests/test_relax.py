import random

import pytest

from oracle_utils import random_toy_grammar
from skope.errors import ConfigError, LexiconError
from skope.grammar import Basic, Complex, Lexicon, LexiconEntry, chart_parse
from skope.lattice import PhonemeLattice
from skope.morph import analyze
from skope.phonology import parse_yale
from skope.relax import (
    DECAY_LOSS,
    DECAY_RETENTION,
    GrammarNode,
    RelaxationParams,
    RelaxationState,
    decay,
    generation_positions,
    load_params,
    parse,
    relax_step,
    spread_down,
    spread_up,
)

PAPER_PARAMS = dict(rho=0.05, rho_prime=0.03, d=0.87, theta=0.51, phi=0.066)

FIG5_FORMS = ["phai-l", "tul", "ul", "ciwu", "ela"]


def fig5_state(lexicon, params):
    state = RelaxationState(len(FIG5_FORMS))
    for slot, form in enumerate(FIG5_FORMS, start=1):
        for cat in sorted(lexicon.senses(form), key=str):
            state.add_lexical(cat, (slot, slot), params.init_lexical, form)
    return state


class TestParams:
    def test_defaults_match_published_values(self):
        p = RelaxationParams()
        assert (p.rho, p.rho_prime, p.d, p.theta, p.phi) == (0.05, 0.03, 0.87, 0.51, 0.066)

    def test_phi_below_theta_enforced(self):
        with pytest.raises(ConfigError):
            RelaxationParams(theta=0.05, phi=0.1)

    def test_range_enforced(self):
        with pytest.raises(ConfigError):
            RelaxationParams(rho=1.5)

    def test_file_round_trip(self, tmp_path):
        f = tmp_path / "p.txt"
        f.write_text("rho=0.1\nd=0.5\ndecay_mode=retention\nmax_cycles=50\ndown_split=false\n")
        p = load_params(f)
        assert p.rho == 0.1 and p.d == 0.5 and p.decay_mode == "retention"
        assert p.max_cycles == 50 and p.down_split is False

    def test_unknown_key_rejected(self, tmp_path):
        f = tmp_path / "p.txt"
        f.write_text("rho2=0.1\n")
        with pytest.raises(ConfigError, match="rho2"):
            load_params(f)

    def test_shipped_params_use_retention(self, shipped_params):
        assert shipped_params.decay_mode == DECAY_RETENTION
        assert shipped_params.theta == 0.51 and shipped_params.phi == 0.066


class TestGenerationPositions:
    def test_leftward_from_second_slot(self):
        assert generation_positions((2, 2), "leftward", 2) == [((1, 2), (1, 1))]

    def test_leftward_at_left_edge_is_empty(self):
        assert generation_positions((1, 1), "leftward", 4) == []

    def test_rightward_enumeration(self):
        assert generation_positions((2, 3), "rightward", 5) == [
            ((2, 4), (4, 4)),
            ((2, 5), (4, 5)),
        ]

    def test_spans_tile_exactly(self):
        for gspan, sspan in generation_positions((3, 5), "leftward", 8):
            assert sspan[1] + 1 == 3 and gspan == (sspan[0], 5)
        for gspan, sspan in generation_positions((3, 5), "rightward", 8):
            assert sspan[0] == 6 and gspan == (3, sspan[1])

    def test_bad_span_rejected(self):
        with pytest.raises(ValueError):
            generation_positions((3, 2), "leftward", 5)


class TestSpreadUp:
    def test_symmetric_parents_split_evenly(self):
        assert spread_up(1.0, [1.0, 1.0], 0.05) == [0.05, 0.05]

    def test_all_mass_to_sole_active_parent(self):
        assert spread_up(1.0, [1.0, 0.0], 0.05) == [0.1, 0.0]

    def test_rich_get_richer_values(self):
        got = spread_up(0.8, [0.6, 0.3], 0.05)
        assert got[0] == pytest.approx(0.064, abs=1e-12)
        assert got[1] == pytest.approx(0.016, abs=1e-12)

    def test_conservation(self):
        rng = random.Random(4)
        for _ in range(200):
            n = rng.randint(1, 6)
            acts = [rng.random() for _ in range(n)]
            a = rng.random()
            total = sum(spread_up(a, acts, 0.05))
            assert total == pytest.approx(n * 0.05 * a, rel=1e-12)

    def test_all_zero_parents_split_uniformly(self):
        assert spread_up(0.6, [0.0, 0.0, 0.0], 0.05) == [0.03, 0.03, 0.03]

    def test_no_parents(self):
        assert spread_up(1.0, [], 0.05) == []


class TestSpreadDown:
    def test_single_child(self):
        assert spread_down(1.0, 1, 0.03) == pytest.approx(0.03, abs=1e-12)

    def test_partitioned_among_children(self):
        assert spread_down(1.0, 3, 0.03) == pytest.approx(0.01, abs=1e-12)

    def test_zero_activation(self):
        assert spread_down(0.0, 5, 0.03) == 0.0

    def test_undivided_mode(self):
        assert spread_down(1.0, 3, 0.03, split=False) == pytest.approx(0.03, abs=1e-12)

    def test_needs_children(self):
        with pytest.raises(ValueError):
            spread_down(1.0, 0, 0.03)


def node(activation, ca, cr):
    n = GrammarNode(0, Basic("x"), (1, 1), activation, "generated", cr=cr, ca=ca)
    return n


class TestDecay:
    def test_complete_node_loss_mode(self):
        p = RelaxationParams(decay_mode=DECAY_LOSS)
        assert decay(node(1.0, 2, 2), p) == pytest.approx(0.13, abs=1e-12)

    def test_complete_node_retention_mode(self):
        p = RelaxationParams(decay_mode=DECAY_RETENTION)
        assert decay(node(1.0, 2, 2), p) == pytest.approx(0.87, abs=1e-12)

    def test_incomplete_penalty_drops_below_removal_threshold(self):
        p = RelaxationParams(decay_mode=DECAY_LOSS)
        got = decay(node(1.0, 1, 2), p)
        assert got == pytest.approx(0.065, abs=1e-12)
        assert got < p.phi

    def test_no_constituents_annihilates(self):
        p = RelaxationParams(decay_mode=DECAY_LOSS)
        assert decay(node(0.5, 0, 1), p) == 0.0

    def test_lexical_counts_as_complete(self):
        p = RelaxationParams(decay_mode=DECAY_LOSS)
        lex_node = GrammarNode(0, Basic("s"), (1, 1), 1.0, "lexical")
        assert decay(lex_node, p) == pytest.approx(0.13, abs=1e-12)


class TestRelaxStep:
    def test_first_step_generates_np_1_2(self, lexicon):
        params = RelaxationParams(decay_mode=DECAY_RETENTION)
        state = fig5_state(lexicon, params)
        relax_step(state, params)
        assert (Basic("np"), (1, 2)) in state.by_key
        new = state.nodes[state.by_key[(Basic("np"), (1, 2))]]
        assert new.kind == "generated" and new.ca == 1 and new.cr == 1
        assert state.cycle == 1

    def test_empty_state_unchanged(self):
        params = RelaxationParams()
        state = RelaxationState(0)
        relax_step(state, params)
        assert state.nodes == {} and state.cycle == 1

    def test_lone_basic_node_generates_nothing_and_decays(self):
        params = RelaxationParams(decay_mode=DECAY_LOSS)
        state = RelaxationState(1)
        state.add_lexical(Basic("s"), (1, 1), 1.0, "m")
        relax_step(state, params)
        assert len(state.nodes) == 1
        assert next(iter(state.nodes.values())).activation == pytest.approx(0.13, abs=1e-12)

    def test_nodes_below_phi_removed(self, lexicon):
        params = RelaxationParams(decay_mode=DECAY_LOSS)
        state = fig5_state(lexicon, params)
        for _ in range(3):
            relax_step(state, params)
            assert all(n.activation >= params.phi for n in state.nodes.values())

    def test_duplicate_generation_merges_and_sums(self, lexicon):
        params = RelaxationParams(decay_mode=DECAY_RETENTION)
        state = fig5_state(lexicon, params)
        before = len(state.nodes)
        relax_step(state, params)
        # np(1,2) was generated from both sides: one node, doubled activation,
        # then it spread/decayed with everything else
        assert len([n for n in state.nodes.values() if n.span == (1, 2)]) == 1


class TestParse:
    def test_five_morpheme_command_retention(self, lexicon):
        params = RelaxationParams(decay_mode=DECAY_RETENTION)
        result = parse(FIG5_FORMS, lexicon, params, record_trace=True)
        assert result.trees, "expected a full parse under retention decay"
        top = result.trees[0]
        assert str(top.category) == "s[command]"
        assert top.span == (1, 5)
        # the generation step is observable in the trace at cycle 1
        assert any(cat == "np" and span == (1, 2) and cycle == 1
                   for cycle, _, cat, span, _ in result.trace)

    def test_five_morpheme_command_loss_mode_fails(self, lexicon):
        params = RelaxationParams(decay_mode=DECAY_LOSS)
        result = parse(FIG5_FORMS, lexicon, params)
        assert result.trees == ()
        assert result.partials  # diagnostics are produced instead

    def test_tree_validates_against_chart(self, lexicon):
        params = RelaxationParams(decay_mode=DECAY_RETENTION)
        result = parse(FIG5_FORMS, lexicon, params)
        oracle = {t.normal_form() for t in chart_parse(FIG5_FORMS, lexicon)}
        for tree in result.trees:
            assert tree.normal_form() in oracle

    def test_single_morpheme_with_sentence_sense(self):
        lex = Lexicon([LexiconEntry("m", (Basic("s"),))])
        result = parse(["m"], lex)
        assert len(result.trees) == 1
        assert result.trees[0].is_leaf and result.trees[0].form == "m"

    def test_missing_form_rejected_for_sequences(self, lexicon):
        with pytest.raises(LexiconError):
            parse(["nosuch"], lexicon)

    def test_deterministic(self, lexicon):
        params = RelaxationParams(decay_mode=DECAY_RETENTION)
        a = parse(FIG5_FORMS, lexicon, params)
        b = parse(FIG5_FORMS, lexicon, params)
        assert [t.normal_form() for t in a.trees] == [t.normal_form() for t in b.trees]
        assert [t.activation for t in a.trees] == [t.activation for t in b.trees]
        assert a.cycles == b.cycles

    def test_rank_stability_under_common_scaling(self, lexicon):
        base = RelaxationParams(decay_mode=DECAY_RETENTION)
        scaled = RelaxationParams(
            decay_mode=DECAY_RETENTION,
            theta=base.theta * 0.5, phi=base.phi * 0.5,
            init_lexical=base.init_lexical * 0.5,
            init_generated=base.init_generated * 0.5,
        )
        a = parse(FIG5_FORMS, lexicon, base)
        b = parse(FIG5_FORMS, lexicon, scaled)
        assert a.trees and b.trees
        assert a.trees[0].normal_form() == b.trees[0].normal_form()
        assert b.trees[0].activation == pytest.approx(a.trees[0].activation * 0.5, rel=0, abs=0)

    def test_oracle_soundness_on_random_grammars(self):
        rng = random.Random(77)
        params = RelaxationParams(decay_mode=DECAY_RETENTION, max_cycles=60)
        for _ in range(40):
            forms, lex = random_toy_grammar(rng)
            result = parse(forms, lex, params)
            oracle = {t.normal_form() for t in chart_parse(forms, lex)}
            for tree in result.trees:
                assert tree.normal_form() in oracle

    def test_activation_never_negative_and_culled(self, lexicon):
        params = RelaxationParams(decay_mode=DECAY_RETENTION)
        state = fig5_state(lexicon, params)
        for _ in range(30):
            relax_step(state, params)
            for n in state.nodes.values():
                assert n.activation >= 0.0
                assert n.activation >= params.phi


class TestParseLattice:
    def test_sample_sentence_end_to_end(self, dictionary, lexicon, inventory, shipped_params):
        truth = [p.symbol for p in parse_yale(inventory, "phail-tul-ul-ciwu-ela")]
        morphs = analyze(PhonemeLattice.from_sequence(truth), dictionary)
        assert morphs.renderings() == ("phai-l+tul+ul+ci-wu+ela",)
        result = parse(morphs, lexicon, shipped_params)
        assert result.trees
        assert str(result.trees[0].category) == "s[command]"
        assert result.trees[0].span == (1, 16)

    def test_unknown_forms_skipped_with_note(self, dictionary, inventory, shipped_params):
        truth = [p.symbol for p in parse_yale(inventory, "phail-tul-ul-ciwu-ela")]
        morphs = analyze(PhonemeLattice.from_sequence(truth), dictionary)
        small = Lexicon([LexiconEntry("phai-l", (Basic("np"),))])
        result = parse(morphs, small, shipped_params)
        assert "tul" in result.skipped_forms

    def test_empty_lattice_gives_empty_result(self, lexicon, shipped_params):
        from skope.morph import MorphemeLattice

        result = parse(MorphemeLattice(()), lexicon, shipped_params)
        assert result.trees == () and result.cycles == 0
