import json
import threading

import pytest
from hypothesis import given, strategies as st

from netbank import BankError, PasswordPolicy
from netbank.errors import INVALID_LOGIN_TEXT, LOGOUT_TEXT, WELCOME_TEXT
from netbank.identity import SPECIAL_CHARACTERS, SessionStore, validate_password

from conftest import (
    ALICE_IC,
    ALICE_PASSWORD,
    BOB_PASSWORD,
    make_bank,
    seed_two_customers,
)


class TestLogin:
    def test_success_issues_session_and_welcome(self, seeded):
        bank, _ = seeded
        result = bank.login("alice", ALICE_PASSWORD)
        assert result["message"] == WELCOME_TEXT
        assert len(result["token"]) == 32  # 128-bit hex
        assert result["must_change"] is False

    def test_invalid_credentials_message_is_byte_exact(self, seeded):
        bank, _ = seeded
        with pytest.raises(BankError) as err:
            bank.login("alice", "wrong")
        assert err.value.code == "INVALID_CREDENTIALS"
        assert err.value.message == "Alert Invalid Username and Password"
        assert err.value.message == INVALID_LOGIN_TEXT

    def test_unknown_username_same_alert(self, seeded):
        bank, _ = seeded
        with pytest.raises(BankError) as err:
            bank.login("mallory", "whatever")
        assert err.value.code == "INVALID_CREDENTIALS"

    def test_cancelled_customer_cannot_login(self, seeded):
        bank, tokens = seeded
        bank.admin_cancel_customer(tokens["admin"], tokens["alice_customer_id"])
        with pytest.raises(BankError) as err:
            bank.login("alice", ALICE_PASSWORD)
        assert err.value.code == "CUSTOMER_CANCELLED"

    def test_password_age_forces_change(self, clock):
        bank = make_bank(clock, policy=PasswordPolicy(max_age_days=90))
        seed_two_customers(bank)
        clock.advance_days(91)
        result = bank.login("alice", ALICE_PASSWORD)
        assert result["must_change"] is True

    def test_password_age_disabled(self, clock):
        bank = make_bank(clock, policy=PasswordPolicy(max_age_days=None))
        seed_two_customers(bank)
        clock.advance_days(400)
        assert bank.login("alice", ALICE_PASSWORD)["must_change"] is False


class TestLockout:
    def test_three_strikes_then_locked_even_with_correct_password(self, seeded):
        bank, tokens = seeded
        for _ in range(3):
            with pytest.raises(BankError) as err:
                bank.login("alice", "nope")
            assert err.value.code == "INVALID_CREDENTIALS"
        with pytest.raises(BankError) as err:
            bank.login("alice", ALICE_PASSWORD)
        assert err.value.code == "LOCKED"
        # re-initialization by the bank unlocks
        bank.admin_reinitialize(tokens["admin"], "alice")
        assert bank.login("alice", ALICE_PASSWORD)["token"]

    def test_success_resets_counter(self, seeded):
        bank, _ = seeded
        for _ in range(2):
            with pytest.raises(BankError):
                bank.login("alice", "nope")
        bank.login("alice", ALICE_PASSWORD)
        assert bank.identity.credentials["alice"].failed_attempts == 0
        for _ in range(2):
            with pytest.raises(BankError):
                bank.login("alice", "nope")
        assert bank.identity.credentials["alice"].locked is False

    def test_reinitialize_requires_admin(self, seeded):
        bank, tokens = seeded
        with pytest.raises(BankError) as err:
            bank.admin_reinitialize(tokens["bob"], "alice")
        assert err.value.code == "NOT_ADMIN"

    def test_reinitialize_unknown_user(self, seeded):
        bank, tokens = seeded
        with pytest.raises(BankError) as err:
            bank.admin_reinitialize(tokens["admin"], "mallory")
        assert err.value.code == "UNKNOWN_USER"

    def test_parallel_failures_do_not_overshoot_threshold(self, seeded):
        bank, _ = seeded
        errors = []

        def attack():
            for _ in range(5):
                try:
                    bank.login("bob", "bad-guess")
                except BankError as exc:
                    errors.append(exc.code)

        threads = [threading.Thread(target=attack) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        cred = bank.identity.credentials["bob"]
        assert cred.locked is True
        assert cred.failed_attempts == bank.policy.max_failed_attempts


class TestTimeout:
    def test_heartbeat_arithmetic(self, seeded):
        bank, _ = seeded
        clock = bank.clock
        token = bank.login("alice", ALICE_PASSWORD)["token"]
        clock.advance(200)
        assert bank.heartbeat(token) == {"remaining_s": 100, "warn": False}
        clock.advance(75)  # idle 275
        assert bank.heartbeat(token) == {"remaining_s": 25, "warn": True}
        clock.advance(25)  # idle 300: boundary, still live, warning window closed
        assert bank.heartbeat(token) == {"remaining_s": 0, "warn": False}
        clock.advance(1)  # idle 301
        with pytest.raises(BankError) as err:
            bank.heartbeat(token)
        assert err.value.code == "SESSION_EXPIRED"

    def test_heartbeat_does_not_refresh(self, seeded):
        bank, _ = seeded
        clock = bank.clock
        token = bank.login("alice", ALICE_PASSWORD)["token"]
        clock.advance(100)
        bank.heartbeat(token)
        clock.advance(100)
        assert bank.heartbeat(token)["remaining_s"] == 100

    def test_continue_resets_activity(self, seeded):
        bank, _ = seeded
        clock = bank.clock
        token = bank.login("alice", ALICE_PASSWORD)["token"]
        clock.advance(299)
        assert bank.heartbeat(token) == {"remaining_s": 1, "warn": True}
        bank.acknowledge_continue(token)
        assert bank.heartbeat(token) == {"remaining_s": 300, "warn": False}

    def test_continue_on_expired_session(self, seeded):
        bank, _ = seeded
        token = bank.login("alice", ALICE_PASSWORD)["token"]
        bank.clock.advance(301)
        with pytest.raises(BankError) as err:
            bank.acknowledge_continue(token)
        assert err.value.code == "SESSION_EXPIRED"

    def test_authenticated_call_counts_as_activity(self, seeded):
        bank, _ = seeded
        clock = bank.clock
        token = bank.login("alice", ALICE_PASSWORD)["token"]
        clock.advance(250)
        bank.accounts_view(token)  # refreshes
        clock.advance(250)
        assert bank.heartbeat(token)["remaining_s"] == 50

    def test_warn_iff_remaining_in_window(self, seeded):
        bank, _ = seeded
        clock = bank.clock
        token = bank.login("alice", ALICE_PASSWORD)["token"]
        for idle in range(0, 301, 7):
            bank.sessions._live  # keep linter quiet
            clock.set_ms(1_700_000_000_000)
            bank.acknowledge_continue(token)
            clock.advance(idle)
            meta = bank.heartbeat(token)
            assert meta["warn"] == (0 < meta["remaining_s"] <= 30)


class TestLogout:
    def test_logout_message_and_token_death(self, seeded):
        bank, _ = seeded
        token = bank.login("alice", ALICE_PASSWORD)["token"]
        assert bank.logout(token)["message"] == LOGOUT_TEXT
        with pytest.raises(BankError) as err:
            bank.accounts_view(token)
        assert err.value.code == "SESSION_EXPIRED"

    def test_double_logout_reports_expired(self, seeded):
        bank, _ = seeded
        token = bank.login("alice", ALICE_PASSWORD)["token"]
        bank.logout(token)
        with pytest.raises(BankError) as err:
            bank.logout(token)
        assert err.value.code == "SESSION_EXPIRED"

    def test_relogin_issues_fresh_token(self, seeded):
        bank, _ = seeded
        first = bank.login("alice", ALICE_PASSWORD)["token"]
        bank.logout(first)
        second = bank.login("alice", ALICE_PASSWORD)["token"]
        assert first != second


class TestPasswordPolicy:
    def test_special_set_is_byte_exact(self):
        assert SPECIAL_CHARACTERS == "!@#%&^&*()_+=[{}|\\:;'\",<.>/?"

    def test_every_special_character_is_accepted(self):
        policy = PasswordPolicy()
        for ch in SPECIAL_CHARACTERS:
            assert validate_password(policy, "abcdefg" + ch) == []

    def test_min_length_rule(self):
        policy = PasswordPolicy(min_length=8)
        assert "min_length" in validate_password(policy, "a!b")

    def test_special_required_rule(self):
        policy = PasswordPolicy()
        assert "require_special" in validate_password(policy, "justletters")

    @given(st.text(max_size=24))
    def test_verdict_is_deterministic(self, candidate):
        policy = PasswordPolicy()
        assert validate_password(policy, candidate) == validate_password(policy, candidate)


class TestChangePassword:
    def test_change_and_relogin(self, seeded):
        bank, tokens = seeded
        bank.change_password(tokens["alice"], ALICE_IC, "Str0ng!pass")
        assert bank.login("alice", "Str0ng!pass")["token"]
        with pytest.raises(BankError):
            bank.login("alice", ALICE_PASSWORD)

    def test_policy_violation_names_rule(self, seeded):
        bank, tokens = seeded
        with pytest.raises(BankError) as err:
            bank.change_password(tokens["alice"], ALICE_IC, "s!")
        assert err.value.code == "POLICY_VIOLATION"
        assert "min_length" in err.value.details["rules"]

    def test_wrong_ic_leaves_password_unchanged(self, seeded):
        bank, tokens = seeded
        with pytest.raises(BankError) as err:
            bank.change_password(tokens["alice"], "000000-00-0000", "Str0ng!pass")
        assert err.value.code == "IC_MISMATCH"
        assert bank.login("alice", ALICE_PASSWORD)["token"]

    def test_first_login_after_admin_add_forces_change(self, seeded):
        bank, tokens = seeded
        bank.admin_add_customer(
            tokens["admin"], {"full_name": "Carol", "ic_passport_no": "IC-C"},
            "carol", "Car0l!pass1", [{"kind": "saving"}])
        result = bank.login("carol", "Car0l!pass1")
        assert result["must_change"] is True
        bank.change_password(result["token"], "IC-C", "N3w!carols")
        assert bank.login("carol", "N3w!carols")["must_change"] is False


class TestProfileAndUtility:
    def test_partial_profile_update(self, seeded):
        bank, tokens = seeded
        before_phone = bank.identity.customers[tokens["alice_customer_id"]].phone
        view = bank.update_profile(tokens["alice"], {"email": "a@b.c"})
        assert view["email"] == "a@b.c"
        assert view["phone"] == before_phone

    def test_secure_delivery_contact_update(self, seeded):
        bank, tokens = seeded
        view = bank.update_profile(tokens["alice"], {"secure_delivery_contact": "+60-12-345"})
        assert view["secure_delivery_contact"] == "+60-12-345"

    def test_immutable_field_rejected(self, seeded):
        bank, tokens = seeded
        with pytest.raises(BankError) as err:
            bank.update_profile(tokens["alice"], {"customer_id": "X"})
        assert err.value.code == "INVALID_FIELD"

    def test_cancel_atm_once(self, seeded):
        bank, tokens = seeded
        assert bank.cancel_atm(tokens["alice"]) == {"atm_enabled": False}
        with pytest.raises(BankError) as err:
            bank.cancel_atm(tokens["alice"])
        assert err.value.code == "ALREADY_CANCELLED"


class TestAdminCustomerLifecycle:
    def test_duplicate_username(self, seeded):
        bank, tokens = seeded
        with pytest.raises(BankError) as err:
            bank.admin_add_customer(tokens["admin"], {"full_name": "Evil", "ic_passport_no": "X"},
                                    "alice", "Dup!icate1")
        assert err.value.code == "DUPLICATE_USERNAME"

    def test_cancel_kills_live_sessions(self, seeded):
        bank, tokens = seeded
        bank.admin_cancel_customer(tokens["admin"], tokens["alice_customer_id"])
        with pytest.raises(BankError) as err:
            bank.heartbeat(tokens["alice"])
        assert err.value.code == "SESSION_EXPIRED"

    def test_cancel_unknown_customer(self, seeded):
        bank, tokens = seeded
        with pytest.raises(BankError) as err:
            bank.admin_cancel_customer(tokens["admin"], "C99999")
        assert err.value.code == "UNKNOWN_CUSTOMER"

    def test_add_requires_admin(self, seeded):
        bank, tokens = seeded
        with pytest.raises(BankError) as err:
            bank.admin_add_customer(tokens["alice"], {"full_name": "X", "ic_passport_no": "Y"},
                                    "eve", "Ev3!secure")
        assert err.value.code == "NOT_ADMIN"


class TestSecretsNeverStored:
    def test_state_dict_contains_no_plaintext_password(self, seeded):
        bank, _ = seeded
        blob = json.dumps(bank.to_state_dict())
        assert ALICE_PASSWORD not in blob
        assert BOB_PASSWORD not in blob

    def test_login_response_contains_no_digest(self, seeded):
        bank, _ = seeded
        result = bank.login("alice", ALICE_PASSWORD)
        cred = bank.identity.credentials["alice"]
        assert cred.digest_hex not in json.dumps(result)


class TestTokens:
    def test_tokens_unique_at_scale(self):
        store = SessionStore(300)
        tokens = {store.create("u", "c", 0).token for _ in range(100_000)}
        assert len(tokens) == 100_000
