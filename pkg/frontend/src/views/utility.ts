import { ApiClient } from "../api.js";
import { clear, el } from "../dom.js";
import { validatePasswordForm } from "../validation.js";

/**
 * Utility: change password (requires IC/Passport number), update the
 * online profile and secure delivery contact, cancel ATM facilities.
 */
export function renderUtility(root: HTMLElement, api: ApiClient, onPasswordChanged?: () => void): void {
  clear(root);
  const status = el("p", { class: "status-line" });
  root.append(el("h2", {}, ["Utility"]), status);

  const ic = el("input", { placeholder: "IC/Passport No", name: "ic_passport_no" });
  const newPassword = el("input", { type: "password", placeholder: "New password", name: "new_password" });
  const passwordError = el("span", { class: "field-error", "data-error": "password" });
  const changeButton = el("button", { type: "submit" }, ["Change password"]);
  const passwordForm = el("form", { id: "password-form" }, [
    el("h3", {}, ["Change password"]),
    el("label", {}, ["IC/Passport No ", ic]),
    el("label", {}, ["New password ", newPassword]),
    passwordError,
    changeButton,
  ]);
  passwordForm.addEventListener("submit", (event) => {
    event.preventDefault();
    const errors = validatePasswordForm(ic.value, newPassword.value);
    passwordError.textContent = Object.values(errors).join("; ");
    if (Object.keys(errors).length > 0) return;
    api
      .changePassword(ic.value.trim(), newPassword.value)
      .then(() => {
        status.textContent = "Password changed";
        onPasswordChanged?.();
      })
      .catch((err) => (passwordError.textContent = err.message));
  });
  root.append(passwordForm);

  const email = el("input", { placeholder: "E-mail", name: "email" });
  const address = el("input", { placeholder: "Postal address", name: "postal_address" });
  const phone = el("input", { placeholder: "Phone", name: "phone" });
  const contact = el("input", { placeholder: "Secure delivery contact", name: "secure_delivery_contact" });
  const saveProfile = el("button", { type: "submit" }, ["Update profile"]);
  const profileForm = el("form", { id: "profile-form" }, [
    el("h3", {}, ["Online profile"]),
    el("label", {}, ["E-mail ", email]),
    el("label", {}, ["Address ", address]),
    el("label", {}, ["Phone ", phone]),
    el("label", {}, ["Secure delivery contact ", contact]),
    saveProfile,
  ]);
  profileForm.addEventListener("submit", (event) => {
    event.preventDefault();
    const fields: Record<string, string> = {};
    if (email.value.trim()) fields.email = email.value.trim();
    if (address.value.trim()) fields.postal_address = address.value.trim();
    if (phone.value.trim()) fields.phone = phone.value.trim();
    if (contact.value.trim()) fields.secure_delivery_contact = contact.value.trim();
    if (Object.keys(fields).length === 0) return;
    api
      .updateProfile(fields)
      .then(() => (status.textContent = "Profile updated"))
      .catch((err) => (status.textContent = err.message));
  });
  root.append(profileForm);

  const cancelAtm = el("button", { id: "cancel-atm" }, ["Cancel ATM facilities"]);
  cancelAtm.addEventListener("click", () => {
    api
      .cancelAtm()
      .then(() => (status.textContent = "ATM facilities cancelled"))
      .catch((err) => (status.textContent = err.message));
  });
  root.append(el("div", {}, [el("h3", {}, ["ATM"]), cancelAtm]));
}
