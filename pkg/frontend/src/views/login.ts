import { ApiClient, ApiError } from "../api.js";
import { clear, el } from "../dom.js";

/**
 * The log-on screen. Server error messages are rendered verbatim (the
 * invalid-credentials alert and the locked-account explanation are
 * mandated texts).
 */
export function renderLogin(
  root: HTMLElement,
  api: ApiClient,
  onSuccess: (result: { token: string; message: string; must_change: boolean; customer_id: string | null }) => void,
  notice = "",
): void {
  clear(root);
  const alertBox = el("p", { class: "alert", role: "alert" });
  const noticeBox = el("p", { class: "notice" }, notice ? [notice] : []);
  const username = el("input", { name: "username", autocomplete: "username" });
  const password = el("input", { name: "password", type: "password", autocomplete: "current-password" });
  const submit = el("button", { type: "submit" }, ["Log on"]);

  const form = el("form", { id: "login-form" }, [
    el("label", {}, ["Username ", username]),
    el("label", {}, ["Password ", password]),
    submit,
  ]);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    submit.disabled = true;
    api
      .login(username.value, password.value)
      .then((result) => {
        api.token = result.token;
        onSuccess(result);
      })
      .catch((err) => {
        alertBox.textContent = err instanceof ApiError ? err.message : String(err);
        submit.disabled = false;
      });
  });

  root.append(
    el("section", { id: "login-screen" }, [
      el("h1", {}, ["Internet Banking"]),
      noticeBox,
      alertBox,
      form,
    ]),
  );
}
