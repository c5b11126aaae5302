"""
測試 JSON 解析：範疇、單純集合與 Σ-集合
"""
import json

import pytest

from src.parsers.category_parser import dump_category, load_category, parse_category, structure_to_document
from src.parsers.simplicial_parser import (
    load_json, parse_sigma_set, parse_simplicial_set, sigma_set_to_document, simplicial_set_to_document,
)
from src.services.sigma_checks import validate_sigma_set
from src.services.sigma_service import p_delta
from src.services.simplicial_checks import standard_simplex, validate_simplicial
from src.utils.exceptions import ConfigurationError, ValidationError
from src.utils.types import BicartMode


def _point_category(**extra):
    doc = {
        "name": "point",
        "objects": [{"id": "0", "zero": True}],
        "morphisms": [{"id": "id0", "src": "0", "dst": "0", "mono": True, "epi": True}],
        "identities": {"0": "id0"},
        "composition": [["id0", "id0", "id0"]],
    }
    doc.update(extra)
    return doc


POINT_SIMPLICIAL = {
    "name": "point",
    "N": 1,
    "cells": {"0": ["a"], "1": ["aa"]},
    "d": {"1,0": {"aa": "a"}, "1,1": {"aa": "a"}},
    "s": {"0,0": {"a": "aa"}},
}


class TestCategoryParser:

    def test_parse_point(self):
        E = parse_category(_point_category())

        assert E.name == "point"
        assert E.zeros == (0,)
        assert E.bicart_mode == BicartMode.DERIVED

    def test_parse_json_string(self):
        E = parse_category(json.dumps(_point_category()))

        assert len(E.base.morphisms) == 1

    def test_unknown_field_rejected(self):
        with pytest.raises(ValidationError):
            parse_category(_point_category(colour="red"))

    def test_unknown_reference_rejected(self):
        doc = _point_category(identities={"0": "nope"})

        with pytest.raises(ValidationError):
            parse_category(doc)

    def test_missing_composite_rejected(self):
        doc = _point_category(composition=[])

        with pytest.raises(ValidationError):
            parse_category(doc)

    def test_round_trip_preserves_sizes(self, vect21):
        E = parse_category(structure_to_document(vect21))

        assert len(E.base.objects) == len(vect21.base.objects)
        assert len(E.base.morphisms) == len(vect21.base.morphisms)
        assert len(E.monos) == len(vect21.monos)
        assert len(E.epis) == len(vect21.epis)
        assert len(E.zeros) == len(vect21.zeros)

    def test_designated_squares_are_written(self, pointed3):
        doc = structure_to_document(pointed3)

        assert len(doc['bicartesian']) == len(pointed3.designated)
        assert parse_category(doc).bicart_mode == BicartMode.DESIGNATED

    def test_load_from_file(self, tmp_path, vect21):
        path = tmp_path / "vect21.json"
        path.write_text(dump_category(vect21), encoding='utf-8')

        E = load_category(path)

        assert E.name == vect21.name

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_category(tmp_path / "absent.json")


class TestSimplicialParser:

    def test_point(self):
        X = parse_simplicial_set(POINT_SIMPLICIAL)

        assert X.bound == 1
        assert validate_simplicial(X).passed

    def test_missing_table_entry(self):
        doc = dict(POINT_SIMPLICIAL, d={"1,0": {"aa": "a"}, "1,1": {}})

        with pytest.raises(ValidationError):
            parse_simplicial_set(doc)

    def test_missing_level(self):
        doc = dict(POINT_SIMPLICIAL, N=2)

        with pytest.raises(ValidationError):
            parse_simplicial_set(doc)

    def test_extra_field_rejected(self):
        with pytest.raises(ValidationError):
            parse_simplicial_set(dict(POINT_SIMPLICIAL, extra=1))

    def test_document_round_trip(self):
        X = standard_simplex(1, 2)

        Y = parse_simplicial_set(simplicial_set_to_document(X))

        assert [Y.count(n) for n in range(3)] == [X.count(n) for n in range(3)]
        assert Y.faces == X.faces
        assert validate_simplicial(Y).passed


class TestSigmaParser:

    def test_template_round_trip(self):
        P = p_delta(1)

        Q = parse_sigma_set(sigma_set_to_document(P))

        assert Q.bound == P.bound
        assert Q.aug_map == P.aug_map
        assert Q.generators == P.generators
        assert validate_sigma_set(Q).passed

    def test_missing_sigma_object(self):
        doc = sigma_set_to_document(p_delta(1))
        del doc['cells']['0,0']

        with pytest.raises(ValidationError):
            parse_sigma_set(doc)

    def test_bad_operator_key(self):
        doc = sigma_set_to_document(p_delta(1))
        doc['d']['x,y'] = {}

        with pytest.raises(ValidationError):
            parse_sigma_set(doc)


class TestLoadJson:

    def test_not_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{", encoding='utf-8')

        with pytest.raises(ConfigurationError):
            load_json(path)


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
