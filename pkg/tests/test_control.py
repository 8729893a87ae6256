import json
import queue

import numpy as np
import pytest
from fastapi.testclient import TestClient

from bincdr.cdr import EnhancerParams
from bincdr.control import build_app, handle_message, state_message
from bincdr.engine import ParamMailbox, Telemetry


@pytest.fixture
def mailbox():
    return ParamMailbox(EnhancerParams())


class TestHandleMessage:
    def test_set_param_ack(self, mailbox):
        reply = handle_message('{"type":"set_param","name":"S","value":10}',
                               mailbox)
        assert reply == {"type": "ack", "name": "S", "value": 10.0}
        assert mailbox.peek()[0].s == 10.0

    def test_set_each_parameter(self, mailbox):
        for name, value, attr in [("lambda", 0.5, "smoothing"), ("mu", 0.8, "mu"),
                                  ("g_min", 0.2, "g_min")]:
            reply = handle_message(json.dumps(
                {"type": "set_param", "name": name, "value": value}), mailbox)
            assert reply["type"] == "ack"
            assert getattr(mailbox.peek()[0], attr) == value

    def test_out_of_range_rejected(self, mailbox):
        reply = handle_message('{"type":"set_param","name":"S","value":5000}',
                               mailbox)
        assert reply["type"] == "error"
        assert mailbox.peek()[0].s == 1.0

    def test_unknown_param_rejected(self, mailbox):
        reply = handle_message(
            '{"type":"set_param","name":"reverb","value":1}', mailbox)
        assert reply["type"] == "error"

    def test_bypass_roundtrip(self, mailbox):
        reply = handle_message('{"type":"bypass","on":true}', mailbox)
        assert reply == {"type": "ack", "name": "bypass", "value": True}
        assert mailbox.peek()[1] is True

    def test_get_state_full_params(self, mailbox):
        mailbox.set_param("S", 3.0)
        reply = handle_message('{"type":"get_state"}', mailbox)
        assert reply == {"type": "state", "S": 3.0, "lambda": 0.72,
                         "mu": 1.0, "g_min": 0.1, "bypass": False}

    def test_unknown_fields_ignored(self, mailbox):
        reply = handle_message(
            '{"type":"set_param","name":"S","value":2,"extra":"x","nonce":1}',
            mailbox)
        assert reply["type"] == "ack"

    @pytest.mark.parametrize("bad", [
        "not json at all", "[1,2,3]", "42", '"str"',
        '{"type":"launch"}', '{"type":null}', "{}",
        '{"type":"set_param"}', '{"type":"set_param","name":"S"}',
        '{"type":"set_param","name":"S","value":"ten"}',
        '{"type":"set_param","name":"S","value":true}',
        '{"type":"set_param","name":7,"value":1}',
        '{"type":"bypass"}', '{"type":"bypass","on":"yes"}',
        '{"type":"set_param","name":"S","value":1e309}',
    ])
    def test_fuzz_messages_get_errors_not_crashes(self, mailbox, bad):
        reply = handle_message(bad, mailbox)
        assert reply["type"] == "error"
        assert isinstance(reply["msg"], str)
        assert mailbox.peek()[0].s == 1.0  # state untouched

    def test_golden_message_set(self, mailbox):
        golden = [
            ('{"type":"get_state"}', "state"),
            ('{"type":"set_param","name":"S","value":0.01}', "ack"),
            ('{"type":"set_param","name":"S","value":1000}', "ack"),
            ('{"type":"set_param","name":"S","value":0.009}', "error"),
            ('{"type":"set_param","name":"lambda","value":0.999}', "ack"),
            ('{"type":"set_param","name":"lambda","value":-0.1}', "error"),
            ('{"type":"set_param","name":"g_min","value":1.0}', "ack"),
            ('{"type":"set_param","name":"g_min","value":0.0}', "error"),
            ('{"type":"set_param","name":"mu","value":2.0}', "ack"),
            ('{"type":"set_param","name":"mu","value":2.01}', "error"),
            ('{"type":"bypass","on":false}', "ack"),
        ]
        for msg, expected in golden:
            assert handle_message(msg, mailbox)["type"] == expected


class TestWebSocket:
    def test_roundtrip_over_socket(self, mailbox):
        app = build_app(mailbox)
        with TestClient(app) as client:
            with client.websocket_connect("/ws") as ws:
                ws.send_text('{"type":"get_state"}')
                assert json.loads(ws.receive_text())["type"] == "state"
                ws.send_text('{"type":"set_param","name":"S","value":42}')
                reply = json.loads(ws.receive_text())
                assert reply == {"type": "ack", "name": "S", "value": 42.0}
                ws.send_text("garbage")
                assert json.loads(ws.receive_text())["type"] == "error"

    def test_telemetry_broadcast(self, mailbox):
        tq = queue.Queue()
        app = build_app(mailbox, tq)
        with TestClient(app) as client:
            with client.websocket_connect("/ws") as ws:
                ws.send_text('{"type":"get_state"}')
                ws.receive_text()
                tq.put(Telemetry(frame=7, band_cdr=[1.0] * 16,
                                 band_gain=[0.5] * 16, mean_coh=0.8))
                msg = json.loads(ws.receive_text())
                assert msg["type"] == "telemetry"
                assert msg["frame"] == 7
                assert len(msg["band_gain"]) == 16

    def test_state_message_helper(self, mailbox):
        mailbox.set_bypass(True)
        msg = state_message(mailbox)
        assert msg["bypass"] is True
        assert set(msg) == {"type", "S", "lambda", "mu", "g_min", "bypass"}
