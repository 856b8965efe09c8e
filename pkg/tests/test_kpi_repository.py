import numpy as np
import pytest

from kpistat.analyzers import KpiRepository
from kpistat.errors import DuplicateLabel, EmptyDataset, ParseError, TooFewSamples, UnknownDataset, ZeroVariance
from kpistat.models import DatasetName, KpiFrame, StandardizeMode, StandardizeSpec, ZeroVariancePolicy


class TestLoadCsv:
    def test_units_are_split_from_labels(self):
        frame = KpiRepository.load_csv("hour,latency (second),throughput (Mbps)\nHr 1,0.00204,2.442508\n")
        assert frame.sample_labels == ["Hr 1"]
        assert frame.variable_labels == ["latency", "throughput"]
        assert frame.units == ["second", "Mbps"]
        assert frame.values == [[0.00204, 2.442508]]
        assert frame.sample_column == "hour"

    def test_zero_row(self):
        frame = KpiRepository.load_csv("id,x,y\na,0,0\n")
        assert (frame.n_samples, frame.n_variables) == (1, 2)
        assert frame.values == [[0.0, 0.0]]
        assert frame.units == ["", ""]

    def test_crlf_bom_and_blank_lines(self):
        frame = KpiRepository.load_csv("\ufeffid,x\r\na,1.5\r\n\r\nb,-2e-3\r\n")
        assert frame.sample_labels == ["a", "b"]
        assert frame.values == [[1.5], [-0.002]]

    def test_ragged_row_reports_row(self):
        with pytest.raises(ParseError) as error:
            KpiRepository.load_csv("s,a,b\nx,1,2\ny,3\n")
        assert error.value.row == 3
        assert "row 3" in error.value.detail

    def test_non_numeric_cell_reports_row_and_column(self):
        with pytest.raises(ParseError) as error:
            KpiRepository.load_csv("s,a,b\nx,1,2\ny,3,abc\n")
        assert (error.value.row, error.value.column) == (3, 3)

    @pytest.mark.parametrize("cell", ["nan", "inf", "", "1,5"])
    def test_rejects_non_finite_or_malformed(self, cell):
        with pytest.raises(ParseError):
            KpiRepository.load_csv(f's,a\nx,"{cell}"\n')

    def test_duplicate_sample_label(self):
        with pytest.raises(DuplicateLabel):
            KpiRepository.load_csv("s,a\nx,1\nx,2\n")

    def test_duplicate_variable_label(self):
        with pytest.raises(DuplicateLabel):
            KpiRepository.load_csv("s,a (ms),a (s)\nx,1,2\n")

    @pytest.mark.parametrize("text", ["", "\n\n", "s,a,b\n"])
    def test_empty_body(self, text):
        with pytest.raises(EmptyDataset):
            KpiRepository.load_csv(text)


class TestSerialize:
    @pytest.mark.parametrize("name", list(DatasetName))
    def test_fixture_round_trip_is_byte_exact(self, name):
        text = KpiRepository.builtin_text(name)
        assert KpiRepository.serialize(KpiRepository.load_csv(text)) == text

    def test_random_frames_round_trip_value_exact(self, rng):
        for _ in range(20):
            matrix = rng.normal(scale=10.0 ** rng.integers(-6, 6), size=(4, 3))
            frame = KpiFrame.from_matrix(["a", "b", "c", "d"], ["x", "y", "z"], ["s", "", "Mbps"], matrix)
            assert KpiRepository.load_csv(KpiRepository.serialize(frame)) == frame


class TestStandardize:
    def test_zscore_small_column(self):
        frame = KpiFrame.from_matrix(["a", "b", "c"], ["x"], [""], [[1.0], [2.0], [3.0]])
        scaled = KpiRepository.standardize(frame)
        np.testing.assert_allclose(scaled.column("x"), [-1.0, 0.0, 1.0], atol=1e-15)

    def test_mode_none_is_identity(self, table1):
        assert KpiRepository.standardize(table1, StandardizeSpec(mode=StandardizeMode.NONE)) == table1

    def test_zscore_table1(self, table1, table1_zscored):
        for label in table1.variable_labels:
            column = table1.column(label)
            expected = (column - column.mean()) / column.std(ddof=1)
            np.testing.assert_allclose(table1_zscored.column(label), expected, atol=1e-12)
            assert table1_zscored.column(label).mean() == pytest.approx(0.0, abs=1e-12)
            assert table1_zscored.column(label).std(ddof=1) == pytest.approx(1.0, abs=1e-12)

    def test_zscore_is_idempotent(self, table1_zscored):
        again = KpiRepository.standardize(table1_zscored)
        np.testing.assert_allclose(again.matrix, table1_zscored.matrix, atol=1e-12)

    def test_unit_range(self, table2):
        scaled = KpiRepository.standardize(table2, StandardizeSpec(mode=StandardizeMode.UNIT_RANGE))
        np.testing.assert_allclose(scaled.matrix.min(axis=0), 0.0, atol=1e-15)
        np.testing.assert_allclose(scaled.matrix.max(axis=0), 1.0, atol=1e-15)

    def test_zero_variance_error(self):
        frame = KpiFrame.from_matrix(["a", "b"], ["x", "flat"], ["", ""], [[1.0, 5.0], [2.0, 5.0]])
        with pytest.raises(ZeroVariance) as error:
            KpiRepository.standardize(frame)
        assert error.value.label == "flat"

    def test_zero_variance_drop_column(self):
        frame = KpiFrame.from_matrix(["a", "b"], ["x", "flat"], ["", "ms"], [[1.0, 5.0], [2.0, 5.0]])
        scaled = KpiRepository.standardize(frame, StandardizeSpec(zero_variance_policy=ZeroVariancePolicy.DROP_COLUMN))
        assert scaled.variable_labels == ["x"]
        assert scaled.units == [""]

    def test_every_column_dropped(self):
        frame = KpiFrame.from_matrix(["a", "b"], ["flat"], [""], [[5.0], [5.0]])
        with pytest.raises(EmptyDataset):
            KpiRepository.standardize(frame, StandardizeSpec(zero_variance_policy=ZeroVariancePolicy.DROP_COLUMN))

    def test_zscore_needs_two_samples(self):
        frame = KpiFrame.from_matrix(["a"], ["x"], [""], [[1.0]])
        with pytest.raises(TooFewSamples):
            KpiRepository.standardize(frame)


class TestBuiltinDatasets:
    def test_table1_shape_and_cells(self, table1):
        assert (table1.n_samples, table1.n_variables) == (20, 5)
        assert table1.sample_labels == [f"Hr {i}" for i in range(1, 21)]
        assert table1.variable_labels == [
            "GGSN utilization", "Gn interface Packet loss", "Gi interface Packet loss", "Latency", "Gi throughput",
        ]
        assert table1.units == ["%", "Packet/s", "Packet/s", "second", "Mbps"]
        assert table1.value("Hr 6", "Gi throughput") == 238.313785
        assert table1.value("Hr 9", "Gn interface Packet loss") == 0.00333

    def test_table2_shape_and_cells(self, table2):
        assert (table2.n_samples, table2.n_variables) == (20, 8)
        assert table2.variable_labels == [
            "Latency", "Throughput", "Packet Losses", "Web service", "Voice", "FTP", "E-mail", "Video",
        ]
        assert table2.value("Sample 18", "Packet Losses") == 11.0

    def test_unknown_dataset(self):
        with pytest.raises(UnknownDataset):
            KpiRepository.builtin_dataset("table9")

    def test_list_datasets(self):
        infos = {info.name: info for info in KpiRepository.list_datasets()}
        assert set(infos) == set(DatasetName)
        assert infos[DatasetName.TABLE2_SERVICES].aliases == {"Audio": "Voice"}
        assert infos[DatasetName.TABLE1_KPI].n_samples == 20

    def test_published_references(self, table2):
        services = KpiRepository.dataset_info("table2_services")
        pairs = {(cell.row, cell.column) for cell in services.published_correlations}
        assert len(pairs) == 28
        assert {label for pair in pairs for label in pair} == set(table2.variable_labels)
        assert KpiRepository.dataset_info(DatasetName.TABLE1_KPI).published_mds_proportion == 0.8215
        with pytest.raises(UnknownDataset):
            KpiRepository.dataset_info("table9")
