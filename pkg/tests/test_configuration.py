"Contains unit tests for the parameter records and their JSON files"
import os
import unittest
from io import StringIO
from tempfile import TemporaryDirectory
from unittest import mock

from marblekit.configuration import (DEFAULT_CONFIG, ControlParams, RunConfig, SurgeryParams,
                                     load_config, load_params, save_config)
from marblekit.error import ParameterError

from .example_scenes import BAD_THRESHOLDS


class ConfigurationTests(unittest.TestCase):
    "Unit tests for loading, saving and validating configurations"

    def test_save_and_load(self):
        "A saved configuration is read back unchanged"
        config = DEFAULT_CONFIG._replace(seed=7, control=ControlParams(n=3, alpha=1.0))
        with TemporaryDirectory() as directory:
            filename = os.path.join(directory, "config.json")
            save_config(config, filename)
            self.assertEqual(load_config(filename), config)

    def test_save_to_file_object(self):
        buffer = StringIO()
        save_config(DEFAULT_CONFIG, buffer)
        buffer.seek(0)
        self.assertEqual(load_config(buffer), DEFAULT_CONFIG)

    def test_partial_dict(self):
        "Missing keys keep their defaults"
        config = load_config({"surgery": {"Gamma": 5.0}})
        self.assertEqual(config.surgery.Gamma, 5.0)
        self.assertEqual(config.surgery.H_neck, SurgeryParams().H_neck)
        self.assertEqual(config.control, ControlParams())

    def test_unknown_keys(self):
        with self.assertRaises(ParameterError):
            load_config({"speed": 3})
        with self.assertRaises(ParameterError):
            load_config({"control": {"gamma": 3}})

    def test_threshold_order(self):
        "The curvature thresholds have to increase"
        with self.assertRaises(ParameterError) as context:
            load_config(BAD_THRESHOLDS)
        self.assertEqual(context.exception.witness, "H_thick")

    def test_threshold_ratio(self):
        with self.assertRaises(ParameterError):
            SurgeryParams(H_thick=8.0, H_neck=10.0, H_trig=32.0).validate()

    def test_neck_radius(self):
        "The neck radius follows from H_neck unless it is set"
        self.assertAlmostEqual(SurgeryParams().neck_radius(2), 1 / 16, delta=1e-12)
        self.assertEqual(SurgeryParams(r_neck=0.01).neck_radius(2), 0.01)

    def test_alpha_bound(self):
        "alpha stays strictly below n-1, the value of the round cylinder"
        with self.assertRaises(ParameterError):
            ControlParams(n=2, alpha=2.5).validate()
        with self.assertRaises(ParameterError) as context:
            ControlParams(n=2, alpha=1.0).validate()
        self.assertEqual(context.exception.witness, "alpha")
        ControlParams(n=2, alpha=0.99).validate()
        ControlParams(n=3, alpha=1.5).validate()

    def test_sigma_range(self):
        with self.assertRaises(ParameterError):
            RunConfig(junction_sigma=1.0).validate()

    def test_marble_ratio(self):
        "Marbles are smaller than the component they replace"
        with self.assertRaises(ParameterError) as context:
            RunConfig(marble_ratio=1.0).validate()
        self.assertEqual(context.exception.witness, "marble_ratio")
        RunConfig(marble_ratio=0.9).validate()

    def test_invalid_json(self):
        with self.assertRaises(ParameterError):
            load_config(StringIO("{\"seed\": "))

    def test_single_record(self):
        self.assertEqual(load_params({"b": 0.2}, ControlParams), ControlParams(b=0.2))

    def test_worker_count(self):
        "The environment caps the worker count unless the configuration sets it"
        with mock.patch.dict(os.environ, {"MARBLEKIT_THREADS": "3"}):
            self.assertEqual(RunConfig().worker_count(), 3)
            self.assertEqual(RunConfig(threads=2).worker_count(), 2)
        with mock.patch.dict(os.environ, {"MARBLEKIT_THREADS": "many"}):
            with self.assertRaises(ParameterError):
                RunConfig().worker_count()
